"""Spin geometries, dipolar couplings, detunings, and static Hamiltonians.

Basis convention, used everywhere: product states are |q_1 q_2 ... q_N> with
spin 1 the most significant bit and sigma_z |0> = +|0>. Diagonal operators are
stored as length-2^N vectors of eigenvalues.
"""

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .constants import TWO_PI
from .units import freq_from_key


class LevelModel(enum.Enum):
    TWO_LEVEL = "two_level"
    TRIPLET = "triplet"
    TWO_LEVEL_WITH_NUCLEI = "with_nuclei"


class GeometryError(ValueError):
    pass


def dipolar_coupling(pos_i, pos_j, reference=(30.0, TWO_PI * 1.9241e3), axis=(0.0, 0.0, 1.0)):
    """ZZ coupling between two sites from the r^-3 dipolar law.

    The common quantization axis (the NV axis, perpendicular to the plane of
    ideal geometries) gives g = g0 (d0/r)^3 (1 - 3 cos^2 theta), with theta the
    angle between the inter-spin vector and the axis. The reference pair
    (d0, g0) is calibrated at theta = 90 degrees.

    Parameters
    ----------
    pos_i, pos_j : (3,) array_like
        Site positions in nm.
    reference : (float, float)
        (d0 in nm, g0 in rad/s) calibration point.
    axis : (3,) array_like
        Common spin quantization axis.
    """
    d0, g0 = reference
    if g0 <= 0:
        raise GeometryError("reference strength must be positive")
    d = np.asarray(pos_j, float) - np.asarray(pos_i, float)
    r = np.linalg.norm(d)
    if r < 1e-9:
        raise GeometryError("degenerate geometry: coincident positions")
    axis = np.asarray(axis, float)
    cos_theta = float(d @ axis) / (r * np.linalg.norm(axis))
    return g0 * (d0 / r) ** 3 * (1.0 - 3.0 * cos_theta**2)


@dataclass(frozen=True)
class CouplingLabel:
    """Pair (i, j), 1-based with i < j, and its ring distance."""

    i: int
    j: int
    order: int

    @staticmethod
    def for_ring(i, j, n_spins):
        if not (1 <= i < j <= n_spins):
            raise ValueError("need 1 <= i < j <= N")
        ell = min(j - i, n_spins - (j - i))
        return CouplingLabel(i, j, ell)


@dataclass(frozen=True)
class NVPhysicalParams:
    """Static NV parameters for the triplet and nuclear-spin models."""

    B_z: float = 0.0  # tesla
    gamma_e: float = TWO_PI * 28.02495164e9
    gamma_c: float = TWO_PI * 10.7084e6
    D_0: float = TWO_PI * 2.87e9
    site_disorder_D: tuple = ()
    site_disorder_z: tuple = ()
    r_c_nm: float = 0.0
    unit_vectors: tuple = ()

    def __post_init__(self):
        for e in self.unit_vectors:
            if abs(np.linalg.norm(np.asarray(e, float)) - 1.0) > 1e-12:
                raise ValueError("nuclear unit vectors must be normalized")


@dataclass(frozen=True)
class SpinSystem:
    """Immutable N-spin system: positions, detunings, and pairwise couplings.

    `detunings` are the effective qubit detunings Delta_i (rad/s) and
    `couplings` is the symmetric zero-diagonal matrix g_ij (rad/s).
    """

    positions: np.ndarray
    detunings: np.ndarray
    couplings: np.ndarray
    level_model: LevelModel = LevelModel.TWO_LEVEL
    params: NVPhysicalParams = field(default_factory=NVPhysicalParams)
    selectivity_at_risk: bool = False

    def __post_init__(self):
        object.__setattr__(self, "positions", np.array(self.positions, float))
        object.__setattr__(self, "detunings", np.array(self.detunings, float))
        object.__setattr__(self, "couplings", np.array(self.couplings, float))
        n = self.n_spins
        if self.positions.shape != (n, 3):
            raise ValueError("positions must be (N, 3)")
        if self.couplings.shape != (n, n):
            raise ValueError("couplings must be (N, N)")
        if not np.allclose(self.couplings, self.couplings.T):
            raise ValueError("couplings must be symmetric")
        if np.any(np.abs(np.diag(self.couplings)) > 0):
            raise ValueError("couplings must have zero diagonal")

    @property
    def n_spins(self):
        return len(self.detunings)

    @property
    def dim(self):
        return 2**self.n_spins

    def coupling(self, i, j):
        """g_ij for 1-based spin labels."""
        return self.couplings[i - 1, j - 1]

    def pairs(self):
        """All (i, j) 1-based pairs with i < j."""
        n = self.n_spins
        return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def sigma_z_diag(i, n_spins):
    """Eigenvalue vector of sigma_z on 1-based spin i over the 2^N basis."""
    idx = np.arange(2**n_spins)
    bits = (idx >> (n_spins - i)) & 1
    return 1.0 - 2.0 * bits


def ring_positions(n_spins, nn_distance=30.0):
    """Equally spaced ring in the z=0 plane with the given NN chord (nm)."""
    radius = nn_distance / (2.0 * np.sin(np.pi / n_spins))
    ang = 2.0 * np.pi * np.arange(n_spins) / n_spins
    return np.column_stack([radius * np.cos(ang), radius * np.sin(ang), np.zeros(n_spins)])


def square_positions(side=30.0):
    """Ideal four-spin square lattice in the z=0 plane (nm)."""
    return np.array([[0, 0, 0], [side, 0, 0], [side, side, 0], [0, side, 0]], float)


def build_system(
    positions,
    detunings,
    level_model=LevelModel.TWO_LEVEL,
    reference=(30.0, TWO_PI * 1.9241e3),
    delta_min=TWO_PI * 4e6,
    params=None,
    detuning_shift_from_couplings=False,
):
    """Assemble a SpinSystem with couplings from dipolar_coupling.

    `detunings` are taken as the effective Delta_i directly; set
    `detuning_shift_from_couplings` to add the sum_k g_ik / 4 shift instead
    (for bare inputs). Detuning pairs closer than `delta_min` only set the
    `selectivity_at_risk` flag, they are not an error.
    """
    positions = np.asarray(positions, float)
    detunings = np.asarray(detunings, float)
    n = len(detunings)
    if positions.shape != (n, 3):
        raise GeometryError("positions/detunings length mismatch")
    g = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            g[i, j] = g[j, i] = dipolar_coupling(positions[i], positions[j], reference)
    if detuning_shift_from_couplings:
        detunings = detunings + g.sum(axis=1) / 4.0
    at_risk = False
    for i in range(n):
        for j in range(i + 1, n):
            if abs(detunings[i] - detunings[j]) < delta_min:
                at_risk = True
    return SpinSystem(
        positions=positions,
        detunings=detunings,
        couplings=g,
        level_model=level_model,
        params=params if params is not None else NVPhysicalParams(),
        selectivity_at_risk=at_risk,
    )


def hamiltonian_zz(system, include_detunings=False):
    """Diagonal of H = sum_i Delta_i/2 sz_i + sum_{i<j} g_ij/4 sz_i sz_j.

    Returns the length-2^N eigenvalue vector (rad/s). By default only the ZZ
    part is included, matching the echo-refocused free evolution; set
    `include_detunings` for the full static Hamiltonian.
    """
    n = system.n_spins
    z = [sigma_z_diag(i, n) for i in range(1, n + 1)]
    diag = np.zeros(system.dim)
    for i in range(n):
        for j in range(i + 1, n):
            diag += system.couplings[i, j] / 4.0 * z[i] * z[j]
    if include_detunings:
        for i in range(n):
            diag += system.detunings[i] / 2.0 * z[i]
    return diag


def system_to_json(system):
    d = {
        "positions_nm": system.positions.tolist(),
        "detunings_MHz": (system.detunings / (TWO_PI * 1e6)).tolist(),
        "level_model": system.level_model.value,
    }
    if system.params.B_z:
        d["B_z_T"] = system.params.B_z
    if system.params.r_c_nm:
        d["nuclei"] = {
            "r_c_nm": system.params.r_c_nm,
            "unit_vectors": [list(e) for e in system.params.unit_vectors],
        }
    return d


def system_from_json(source):
    """Load a system descriptor (dict, JSON text, or file path)."""
    if isinstance(source, str):
        try:
            cfg = json.loads(source)
        except json.JSONDecodeError:
            with open(source) as fh:
                cfg = json.load(fh)
    else:
        cfg = dict(source)
    positions = np.asarray(cfg["positions_nm"], float)
    detunings = freq_from_key(cfg, "detunings")
    model = LevelModel(cfg.get("level_model", "two_level"))
    nuc = cfg.get("nuclei", {})
    params = NVPhysicalParams(
        B_z=float(cfg.get("B_z_T", 0.0)),
        r_c_nm=float(nuc.get("r_c_nm", 0.0)),
        unit_vectors=tuple(tuple(v) for v in nuc.get("unit_vectors", ())),
    )
    if model in (LevelModel.TRIPLET, LevelModel.TWO_LEVEL_WITH_NUCLEI) and params.B_z <= 0:
        raise ValueError("triplet and nuclear models need B_z_T > 0")
    if model is LevelModel.TWO_LEVEL_WITH_NUCLEI and not params.unit_vectors:
        raise ValueError("with_nuclei model needs nuclei.unit_vectors")
    return build_system(positions, detunings, level_model=model, params=params)

"""Three-level (spin-1) register model with the qubit in (|+1>, |0>).

Site basis order is (|+1>, |0>, |-1>), so the logical qubit occupies the
first two levels and the projector P drops |-1>. The static Hamiltonian is
written in the common-carrier rotating frame: the |-1> levels sit at the
large detuning 2 gamma_e B_z above the drive, and the dipolar interaction
keeps its non-rotating combinations (flip-flop pairs built from |+-><0| plus
the S^z S^z part).
"""

import numpy as np

from .constants import S1_X, S1_Y, S1_Z
from .spin_system import LevelModel

MAX_TRIPLET_SPINS = 6

_KET = np.eye(3, dtype=complex)
_C_PLUS = np.outer((_KET[0] + _KET[2]) / np.sqrt(2), _KET[1])
_C_MINUS = np.outer((_KET[0] - _KET[2]) / np.sqrt(2), _KET[1])
_C_P1 = np.outer(_KET[0], _KET[1])
_C_M1 = np.outer(_KET[2], _KET[1])
_P_SITE = np.diag([1.0, 1.0, 0.0]).astype(complex)
# ideal qubit pi_x: exp(-i pi sigma_x / 2) on (|+1>, |0>), identity on |-1>
_QUBIT_PI_X = np.array([[0, -1j, 0], [-1j, 0, 0], [0, 0, 1]], dtype=complex)


def site_operator(op, site, n_sites):
    """Embed a 3x3 single-site operator at 1-based `site`."""
    out = np.array([[1.0 + 0j]])
    for q in range(1, n_sites + 1):
        out = np.kron(out, op if q == site else np.eye(3, dtype=complex))
    return out


def qubit_projector(n_sites):
    """P = prod_i (|+1><+1| + |0><0|)_i."""
    out = np.array([[1.0 + 0j]])
    for _ in range(n_sites):
        out = np.kron(out, _P_SITE)
    return out


def drive_operators(n_sites):
    """Global drive quadratures: sum_i S_i^x / sqrt(2) and the y analogue.

    The 1/sqrt(2) makes the matrix element on the qubit transition equal to
    1/2, matching the two-level sigma/2 convention, while the |0> <-> |-1>
    transition is driven with the same strength.
    """
    bx = sum(site_operator(S1_X, i, n_sites) for i in range(1, n_sites + 1)) / np.sqrt(2)
    by = sum(site_operator(S1_Y, i, n_sites) for i in range(1, n_sites + 1)) / np.sqrt(2)
    return bx, by


def _pair_tensor(system, i, j):
    """In-plane dipolar components (Axx, Ayy, Axy) scaled to A^zz = g_ij."""
    d = system.positions[j - 1] - system.positions[i - 1]
    r = np.linalg.norm(d)
    rh = d / r
    denom = 1.0 - 3.0 * rh[2] ** 2
    if abs(denom) < 1e-12:
        raise ValueError("pair at the magic angle: A^zz vanishes, tensor undefined")
    scale = system.coupling(i, j) / denom
    return (
        scale * (1.0 - 3.0 * rh[0] ** 2),
        scale * (1.0 - 3.0 * rh[1] ** 2),
        scale * (-3.0 * rh[0] * rh[1]),
    )


def hamiltonian_triplet(system, carrier_shift=0.0):
    """Static three-level Hamiltonian (dense, 3^N) in the rotating frame.

    `carrier_shift` moves the frame to a selective-pulse carrier: both upper
    levels shift down by that amount. The |+1> level coefficients are chosen
    so the projected Hamiltonian reproduces the two-level H_z exactly (the
    S^z S^z term supplies the coupling-induced single-spin shifts, and the
    matching constant is subtracted).
    """
    if system.level_model is not LevelModel.TRIPLET:
        raise ValueError("system is not a triplet model")
    n = system.n_spins
    if n > MAX_TRIPLET_SPINS:
        raise ValueError(f"triplet model limited to {MAX_TRIPLET_SPINS} spins")
    params = system.params
    if params.B_z <= 0:
        raise ValueError("triplet model needs B_z > 0")
    dim = 3**n
    h = np.zeros((dim, dim), dtype=complex)
    disorder_z = params.site_disorder_z or (0.0,) * n
    shift = system.couplings.sum(axis=1) / 2.0
    upper = np.diag([1.0, 0.0, 0.0]).astype(complex)
    lower = np.diag([0.0, 0.0, 1.0]).astype(complex)
    const = 0.0
    for i in range(1, n + 1):
        a_i = system.detunings[i - 1] - shift[i - 1] - carrier_shift
        b_i = (
            2.0 * params.gamma_e * params.B_z
            + 2.0 * disorder_z[i - 1]
            + system.detunings[i - 1]
            - carrier_shift
        )
        h += a_i * site_operator(upper, i, n)
        h += b_i * site_operator(lower, i, n)
        const += a_i / 2.0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            g = system.coupling(i, j)
            if g == 0.0:
                continue
            axx, ayy, axy = _pair_tensor(system, i, j)
            cp_i = site_operator(_C_PLUS, i, n)
            cp_j = site_operator(_C_PLUS, j, n)
            cm_i = site_operator(_C_MINUS, i, n)
            cm_j = site_operator(_C_MINUS, j, n)
            cp1_i = site_operator(_C_P1, i, n)
            cp1_j = site_operator(_C_P1, j, n)
            cm1_i = site_operator(_C_M1, i, n)
            cm1_j = site_operator(_C_M1, j, n)
            term = axx * (cp_i @ cp_j.conj().T) + ayy * (cm_i @ cm_j.conj().T)
            term += axy * (1j * cm1_i @ cp1_j.conj().T - 1j * cp1_i @ cm1_j.conj().T)
            h += term + term.conj().T
            h += g * site_operator(S1_Z, i, n) @ site_operator(S1_Z, j, n)
            const += g / 4.0
    h -= const * np.eye(dim)
    return h


def embed_qubit_state(psi, n_sites):
    """Lift a 2^N qubit state into the 3^N space (no |-1> population)."""
    psi = np.asarray(psi, complex)
    out = np.zeros(3**n_sites, dtype=complex)
    for idx in range(2**n_sites):
        t = 0
        for q in range(n_sites):
            bit = (idx >> (n_sites - 1 - q)) & 1
            t = 3 * t + bit
        out[t] = psi[idx]
    return out


def qubit_pi_x_all(n_sites):
    """Ideal broadband pi_x on every qubit subspace, |-1> untouched."""
    out = np.array([[1.0 + 0j]])
    for _ in range(n_sites):
        out = np.kron(out, _QUBIT_PI_X)
    return out


def leakage_population(psi, n_sites):
    """Total probability of any site occupying |-1>."""
    psi = np.asarray(psi, complex)
    probs = np.abs(psi.reshape([3] * n_sites)) ** 2
    keep = probs
    for axis in range(n_sites):
        keep = np.take(keep, [0, 1], axis=axis)
    return float(probs.sum() - keep.sum())

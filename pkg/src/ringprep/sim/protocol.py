"""Protocol execution on dense state vectors for all three level models.

A compiled PulseSequence interleaves free evolutions with selective pi
pulses. Free evolution uses the echo-refocused ZZ Hamiltonian (optionally as
an explicit echo with broadband flips); each selective pi on spin j is the
shaped-half / broadband / shaped-half / inverse-broadband train simulated on
the full register with the global drive, every spin's detuning relative to
the pulse carrier, and all couplings active throughout.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from ..constants import SIGMA_X, SIGMA_Y
from ..nuclei import nuclear_site_hamiltonians
from ..pulses.composite import CompositePulse
from ..pulses.propagate import expm_hermitian
from ..spin_system import LevelModel, hamiltonian_zz, sigma_z_diag
from ..triplet import (
    drive_operators,
    embed_qubit_state,
    hamiltonian_triplet,
    qubit_pi_x_all,
    qubit_projector,
)
from .targets import cluster_target_diag, plus_state, ring_adjacency


@dataclass(frozen=True)
class PulseOptions:
    """Realization switches for protocol runs.

    broadband_in_selective: 'ideal' treats the mid-pulse flips as exact;
    'composite' simulates the rectangular composite train on the register
    (at the selective carrier, couplings active). The initial product state
    is exact for 'ideal' init or prepared by per-spin composite pi/2 pulses
    for 'composite'. echo_free_evolution realizes each interval as two halves
    sandwiched by global flips (forced on for the nuclear model, where the
    echo is what cancels the hyperfine phases).
    """

    n_slices: int = 1500
    midpoint: bool = True
    broadband_in_selective: str = "ideal"
    broadband_pulse: CompositePulse = None
    init_mode: str = "ideal"
    echo_free_evolution: bool = False
    echo_broadband: str = "ideal"
    include_detunings_free: bool = False
    chunk: int = 128


@dataclass
class ProtocolResult:
    state: np.ndarray
    fidelity: float
    metadata: dict = field(default_factory=dict)


def _pauli_sums(n_spins):
    dim = 2**n_spins
    bx = np.zeros((dim, dim), dtype=complex)
    by = np.zeros((dim, dim), dtype=complex)
    for i in range(1, n_spins + 1):
        op_x = np.array([[1.0 + 0j]])
        op_y = np.array([[1.0 + 0j]])
        for q in range(1, n_spins + 1):
            op_x = np.kron(op_x, SIGMA_X if q == i else np.eye(2))
            op_y = np.kron(op_y, SIGMA_Y if q == i else np.eye(2))
        bx += op_x / 2.0
        by += op_y / 2.0
    return bx, by


def _x_all(n_spins, sign=+1):
    """prod_i exp(-i sign pi sigma_x / 2): the ideal global flip."""
    cell = np.array([[0, -1j * sign], [-1j * sign, 0]], dtype=complex)
    out = np.array([[1.0 + 0j]])
    for _ in range(n_spins):
        out = np.kron(out, cell)
    return out


class TwoLevelEngine:
    """Dense 2^N protocol engine."""

    def __init__(self, system, shaped, options=PulseOptions()):
        self.system = system
        self.shaped = shaped
        self.options = options
        n = system.n_spins
        self.n_spins = n
        self.dim = 2**n
        self.zdiags = np.stack([sigma_z_diag(i, n) for i in range(1, n + 1)])
        self.hzz = hamiltonian_zz(system, include_detunings=False)
        self.hzz_det = hamiltonian_zz(system, include_detunings=True)
        self.bx, self.by = _pauli_sums(n)
        self.xall = _x_all(n)
        self._pulse_cache = {}
        shaped_n = replace(shaped, n_slices=options.n_slices, midpoint=options.midpoint)
        self.wave_x, self.wave_y, self.dt = shaped_n.waveform()

    # -- pulse construction -------------------------------------------------

    def _static_diag(self, carrier_spin, delta):
        """z coefficients in the frame of the selective carrier, plus ZZ."""
        det = self.system.detunings
        offs = det - det[carrier_spin - 1] + delta * self.shaped.omega0
        return 0.5 * offs @ self.zdiags + self.hzz

    def half_slice_unitaries(self, carrier_spin, sign, delta, eps):
        """Slice unitaries of one shaped segment on the full register."""
        static = self._static_diag(carrier_spin, delta)
        n_sl = len(self.wave_x)
        out = np.empty((n_sl, self.dim, self.dim), dtype=complex)
        chunk = self.options.chunk
        for start in range(0, n_sl, chunk):
            sl = slice(start, min(start + chunk, n_sl))
            h = (
                np.diag(static)[None, :, :]
                + (1 + eps) * sign * self.wave_x[sl, None, None] * self.bx[None, :, :]
                + (1 + eps) * sign * self.wave_y[sl, None, None] * self.by[None, :, :]
            )
            out[sl] = expm_hermitian(h, self.dt)
        return out

    def _broadband_unitary(self, carrier_spin, sign, delta, eps):
        opts = self.options
        if opts.broadband_in_selective == "ideal":
            return _x_all(self.n_spins, sign)
        pulse = opts.broadband_pulse
        if pulse is None:
            raise ValueError("composite broadband mode needs a broadband_pulse")
        static = self._static_diag(carrier_spin, delta)
        angles, phases = pulse.segments()
        if sign < 0:
            phases = phases + np.pi
        u = np.eye(self.dim, dtype=complex)
        for ang, phi in zip(angles, phases):
            h = np.diag(static) + pulse.rabi * (1 + eps) * (
                np.cos(phi) * self.bx + np.sin(phi) * self.by
            )
            u = expm_hermitian(h, ang / pulse.rabi) @ u
        return u

    def pulse_unitary(self, spin, sign, delta=0.0, eps=0.0):
        """Selective pi (sign=+1) or its inverse (-1) on `spin`, full space."""
        key = (spin, sign, float(delta), float(eps))
        if key not in self._pulse_cache:
            slices = self.half_slice_unitaries(spin, sign, delta, eps)
            half = np.eye(self.dim, dtype=complex)
            for k in range(slices.shape[0]):
                half = slices[k] @ half
            bb = self._broadband_unitary(spin, sign, delta, eps)
            bb_inv = self._broadband_unitary(spin, -sign, delta, eps)
            self._pulse_cache[key] = bb_inv @ half @ bb @ half
        return self._pulse_cache[key]

    # -- free evolution and state preparation --------------------------------

    def free_phases(self, tau):
        diag = self.hzz_det if self.options.include_detunings_free else self.hzz
        return np.exp(-1j * diag * tau)

    def apply_free(self, psi, tau, delta=0.0, eps=0.0):
        if not self.options.echo_free_evolution:
            return self.free_phases(tau) * psi
        half = np.exp(
            -1j
            * (self.hzz_det if self.options.include_detunings_free else self.hzz)
            * (tau / 2.0)
        )
        bb = self._echo_flip(+1, delta, eps)
        bb_inv = self._echo_flip(-1, delta, eps)
        return bb_inv @ (half * (bb @ (half * psi)))

    def _echo_flip(self, sign, delta, eps):
        if self.options.echo_broadband == "ideal":
            return _x_all(self.n_spins, sign)
        return self._per_spin_broadband(sign, delta, eps)

    def _per_spin_broadband(self, sign, delta, eps):
        """Instantaneous per-spin composite flip at the center carrier."""
        pulse = self.options.broadband_pulse
        if pulse is None:
            raise ValueError("composite broadband mode needs a broadband_pulse")
        shifted = replace(pulse, global_phase=pulse.global_phase + (np.pi if sign < 0 else 0.0))
        out = np.array([[1.0 + 0j]])
        for i in range(self.n_spins):
            db = (self.system.detunings[i] + delta * self.shaped.omega0) / pulse.rabi
            out = np.kron(out, shifted.unitary(db, eps))
        return out

    def initial_state(self, delta=0.0, eps=0.0):
        if self.options.init_mode == "ideal":
            return plus_state(self.n_spins)
        pulse = self.options.broadband_pulse
        if pulse is None or pulse.kind != "pi_half":
            raise ValueError("composite init needs a pi_half broadband_pulse")
        prep = replace(pulse, global_phase=pulse.global_phase - np.pi / 2.0)
        psi = np.zeros(self.dim, dtype=complex)
        psi[-1] = 1.0  # all spins in |1>
        u = np.array([[1.0 + 0j]])
        for i in range(self.n_spins):
            db = (self.system.detunings[i] + delta * self.shaped.omega0) / pulse.rabi
            u = np.kron(u, prep.unitary(db, eps))
        return u @ psi

    def target_state(self, adjacency=None):
        adjacency = adjacency or ring_adjacency(self.n_spins)
        return cluster_target_diag(adjacency, self.n_spins) * plus_state(self.n_spins)

    # -- execution ------------------------------------------------------------

    def execute(self, sequence, taus=None, delta=0.0, eps=0.0, psi=None):
        taus = sequence.durations() if taus is None else np.asarray(taus, float)
        if len(taus) != len(sequence.segments):
            raise ValueError("duration vector length mismatch")
        psi = self.initial_state(delta, eps) if psi is None else np.asarray(psi, complex)
        for spin, sign in sequence.slots[0]:
            psi = self.pulse_unitary(spin, sign, delta, eps) @ psi
        for k, tau in enumerate(taus):
            psi = self.apply_free(psi, tau, delta, eps)
            for spin, sign in sequence.slots[k + 1]:
                psi = self.pulse_unitary(spin, sign, delta, eps) @ psi
        return psi

    def fidelity(self, sequence, taus=None, delta=0.0, eps=0.0, adjacency=None):
        psi = self.execute(sequence, taus, delta, eps)
        target = self.target_state(adjacency)
        return float(abs(np.vdot(target, psi)) ** 2)


class TripletEngine:
    """Dense 3^N engine including the far-detuned |-1> levels."""

    def __init__(self, system, shaped, options=PulseOptions()):
        self.system = system
        self.shaped = shaped
        self.options = options
        n = system.n_spins
        self.n_spins = n
        self.dim = 3**n
        self.bx, self.by = drive_operators(n)
        self.h_static = hamiltonian_triplet(system)
        self.xall = qubit_pi_x_all(n)
        self.projector = qubit_projector(n)
        self._pulse_cache = {}
        self._free_cache = {}
        shaped_n = replace(shaped, n_slices=options.n_slices, midpoint=options.midpoint)
        self.wave_x, self.wave_y, self.dt = shaped_n.waveform()

    def _carrier_static(self, carrier_spin, delta):
        shift = self.system.detunings[carrier_spin - 1] - delta * self.shaped.omega0
        return hamiltonian_triplet(self.system, carrier_shift=shift)

    def pulse_unitary(self, spin, sign, delta=0.0, eps=0.0):
        key = (spin, sign, float(delta), float(eps))
        if key not in self._pulse_cache:
            static = self._carrier_static(spin, delta)
            n_sl = len(self.wave_x)
            half = np.eye(self.dim, dtype=complex)
            chunk = self.options.chunk
            for start in range(0, n_sl, chunk):
                sl = slice(start, min(start + chunk, n_sl))
                h = (
                    static[None, :, :]
                    + (1 + eps) * sign * self.wave_x[sl, None, None] * self.bx[None, :, :]
                    + (1 + eps) * sign * self.wave_y[sl, None, None] * self.by[None, :, :]
                )
                u = expm_hermitian(h, self.dt)
                for q in range(u.shape[0]):
                    half = u[q] @ half
            bb = self._broadband_unitary(spin, sign, delta, eps)
            bb_inv = self._broadband_unitary(spin, -sign, delta, eps)
            self._pulse_cache[key] = bb_inv @ half @ bb @ half
        return self._pulse_cache[key]

    def _broadband_unitary(self, carrier_spin, sign, delta, eps, carrier_center=False):
        if self.options.broadband_in_selective == "ideal" and not carrier_center:
            return _qubit_flip(self.n_spins, sign)
        pulse = self.options.broadband_pulse
        if pulse is None:
            return _qubit_flip(self.n_spins, sign)
        shift = 0.0 if carrier_center else self.system.detunings[carrier_spin - 1]
        static = hamiltonian_triplet(self.system, carrier_shift=shift - delta * self.shaped.omega0)
        angles, phases = pulse.segments()
        if sign < 0:
            phases = phases + np.pi
        u = np.eye(self.dim, dtype=complex)
        for ang, phi in zip(angles, phases):
            h = static + pulse.rabi * (1 + eps) * (np.cos(phi) * self.bx + np.sin(phi) * self.by)
            u = expm_hermitian(h, ang / pulse.rabi) @ u
        return u

    def apply_free(self, psi, tau, delta=0.0, eps=0.0):
        """Echoed interval: half, global qubit flip, half, inverse flip."""
        key = float(tau)
        if key not in self._free_cache:
            self._free_cache[key] = expm_hermitian(self.h_static, tau / 2.0)
        half = self._free_cache[key]
        if self.options.echo_broadband == "composite" and self.options.broadband_pulse:
            bb = self._broadband_unitary(1, +1, delta, eps, carrier_center=True)
            bb_inv = self._broadband_unitary(1, -1, delta, eps, carrier_center=True)
        else:
            bb = _qubit_flip(self.n_spins, +1)
            bb_inv = _qubit_flip(self.n_spins, -1)
        return bb_inv @ (half @ (bb @ (half @ psi)))

    def initial_state(self, delta=0.0, eps=0.0):
        psi2 = plus_state(self.n_spins)
        return embed_qubit_state(psi2, self.n_spins)

    def target_state(self, adjacency=None):
        adjacency = adjacency or ring_adjacency(self.n_spins)
        psi2 = cluster_target_diag(adjacency, self.n_spins) * plus_state(self.n_spins)
        return embed_qubit_state(psi2, self.n_spins)

    def execute(self, sequence, taus=None, delta=0.0, eps=0.0, psi=None):
        taus = sequence.durations() if taus is None else np.asarray(taus, float)
        psi = self.initial_state(delta, eps) if psi is None else np.asarray(psi, complex)
        for spin, sign in sequence.slots[0]:
            psi = self.pulse_unitary(spin, sign, delta, eps) @ psi
        for k, tau in enumerate(taus):
            psi = self.apply_free(psi, tau, delta, eps)
            for spin, sign in sequence.slots[k + 1]:
                psi = self.pulse_unitary(spin, sign, delta, eps) @ psi
        return psi

    def fidelity(self, sequence, taus=None, delta=0.0, eps=0.0, adjacency=None):
        psi = self.execute(sequence, taus, delta, eps)
        target = self.target_state(adjacency)
        return float(abs(np.vdot(target, psi)) ** 2)


def _qubit_flip(n_spins, sign):
    if sign > 0:
        return qubit_pi_x_all(n_spins)
    return qubit_pi_x_all(n_spins).conj().T


class NucleiEngine:
    """2^(2N) engine: electrons plus one spin-1/2 nucleus per site.

    States are kept as tensors with N electron bit axes, N nuclear bit axes,
    and optional trailing batch axes. The static nuclear part is block
    diagonal in the electron z basis, so free evolution is exact and pulses
    use a Strang split: half a nuclear step, the exact electron slice, half a
    nuclear step. The echo realization of free intervals is always on here
    (it is what suppresses the hyperfine phases).
    """

    def __init__(self, system, shaped, options=PulseOptions(), r_c_nm=None):
        self.system = system
        self.shaped = shaped
        self.options = options
        n = system.n_spins
        self.n_spins = n
        self.dim_el = 2**n
        self.dim = 4**n
        self.site_h = nuclear_site_hamiltonians(system, r_c_nm)
        self.electron = TwoLevelEngine(system, shaped, options)
        self._pulse_cache = {}

    # -- tensor helpers -------------------------------------------------------

    def _apply_el(self, x, mat):
        n = self.n_spins
        lead = x.shape[: 2 * n]
        rest = x.shape[2 * n :]
        flat = x.reshape(self.dim_el, -1)
        out = mat @ flat
        return out.reshape(lead + rest)

    def _apply_nuclear_pair(self, x, site, u4):
        """Apply a 4x4 on (electron bit, nuclear bit) of one site."""
        n = self.n_spins
        moved = np.moveaxis(x, (site, n + site), (0, 1))
        shape = moved.shape
        flat = moved.reshape(4, -1)
        flat = u4 @ flat
        return np.moveaxis(flat.reshape(shape), (0, 1), (site, n + site))

    def _conditioned_step(self, site, duration):
        """4x4 propagator of nucleus `site` conditioned on its electron bit."""
        up = expm_hermitian(self.site_h[site, 0], duration)  # electron bit 0: sz=+1
        dn = expm_hermitian(self.site_h[site, 1], duration)
        u4 = np.zeros((4, 4), dtype=complex)
        u4[:2, :2] = up
        u4[2:, 2:] = dn
        return u4

    def _free_half(self, x, tau):
        shape = x.shape
        flat = x.reshape(self.dim_el, -1)
        flat = np.exp(-1j * self.electron.hzz * tau)[:, None] * flat
        x = flat.reshape(shape)
        for site in range(self.n_spins):
            x = self._apply_nuclear_pair(x, site, self._conditioned_step(site, tau))
        return x

    def apply_free(self, x, tau, delta=0.0, eps=0.0):
        x = self._free_half(x, tau / 2.0)
        x = self._apply_el(x, self.electron.xall)
        x = self._free_half(x, tau / 2.0)
        x = self._apply_el(x, self.electron.xall.conj().T)
        return x

    def pulse_operator(self, spin, sign, delta=0.0, eps=0.0):
        """Full 2^(2N) selective-pulse operator (cached)."""
        key = (spin, sign, float(delta), float(eps))
        if key in self._pulse_cache:
            return self._pulse_cache[key]
        n = self.n_spins
        ident = np.eye(self.dim, dtype=complex).reshape((2,) * (2 * n) + (self.dim,))
        slices = self.electron.half_slice_unitaries(spin, sign, delta, eps)
        dt = self.electron.dt
        halves = [self._conditioned_step(site, dt / 2.0) for site in range(n)]
        fulls = [self._conditioned_step(site, dt) for site in range(n)]

        def shaped_half(x):
            for site in range(n):
                x = self._apply_nuclear_pair(x, site, halves[site])
            for k in range(slices.shape[0]):
                x = self._apply_el(x, slices[k])
                if k + 1 < slices.shape[0]:
                    for site in range(n):
                        x = self._apply_nuclear_pair(x, site, fulls[site])
            for site in range(n):
                x = self._apply_nuclear_pair(x, site, halves[site])
            return x

        bb = _x_all(n, sign)
        x = shaped_half(ident)
        x = self._apply_el(x, bb)
        x = shaped_half(x)
        x = self._apply_el(x, bb.conj().T)
        op = x.reshape(self.dim, self.dim)
        self._pulse_cache[key] = op
        return op

    # -- protocol -------------------------------------------------------------

    def initial_batch(self):
        """All-|+> electrons against every nuclear basis state (unpolarized)."""
        psi_el = plus_state(self.n_spins)
        batch = np.zeros((self.dim_el, self.dim_el, self.dim_el), dtype=complex)
        for nidx in range(self.dim_el):
            batch[:, nidx, nidx] = psi_el
        return batch.reshape((2,) * (2 * self.n_spins) + (self.dim_el,))

    def execute(self, sequence, taus=None, delta=0.0, eps=0.0):
        taus = sequence.durations() if taus is None else np.asarray(taus, float)
        x = self.initial_batch()
        for spin, sign in sequence.slots[0]:
            x = self._apply_el_full(x, self.pulse_operator(spin, sign, delta, eps))
        for k, tau in enumerate(taus):
            x = self.apply_free(x, tau, delta, eps)
            for spin, sign in sequence.slots[k + 1]:
                x = self._apply_el_full(x, self.pulse_operator(spin, sign, delta, eps))
        return x

    def _apply_el_full(self, x, op):
        lead = x.shape[: 2 * self.n_spins]
        rest = x.shape[2 * self.n_spins :]
        flat = x.reshape(self.dim, -1)
        return (op @ flat).reshape(lead + rest)

    def fidelity(self, sequence, taus=None, delta=0.0, eps=0.0, adjacency=None):
        x = self.execute(sequence, taus, delta, eps)
        adjacency = adjacency or ring_adjacency(self.n_spins)
        target = cluster_target_diag(adjacency, self.n_spins) * plus_state(self.n_spins)
        flat = x.reshape(self.dim_el, self.dim_el, -1)
        overlap = np.einsum("e,enb->nb", target.conj(), flat)
        return float(np.mean(np.sum(np.abs(overlap) ** 2, axis=0)))


def build_engine(system, shaped, options=PulseOptions(), r_c_nm=None):
    if system.level_model is LevelModel.TWO_LEVEL:
        return TwoLevelEngine(system, shaped, options)
    if system.level_model is LevelModel.TRIPLET:
        return TripletEngine(system, shaped, options)
    return NucleiEngine(system, shaped, options, r_c_nm=r_c_nm)


def run_protocol(system, sequence, shaped, delta=0.0, eps=0.0, options=PulseOptions(),
                 taus=None, adjacency=None):
    """Execute a compiled sequence and return the state and fidelity."""
    engine = build_engine(system, shaped, options)
    if isinstance(engine, NucleiEngine):
        fidelity = engine.fidelity(sequence, taus, delta, eps, adjacency)
        return ProtocolResult(state=np.empty(0), fidelity=fidelity,
                              metadata={"model": system.level_model.value})
    psi = engine.execute(sequence, taus, delta, eps)
    target = engine.target_state(adjacency)
    fid = float(abs(np.vdot(target, psi)) ** 2)
    return ProtocolResult(state=psi, fidelity=fid,
                          metadata={"model": system.level_model.value})

"""Frequency-selective pulses: Gaussian-enveloped sine series plus echo.

One shaped segment spans [0, T_s/2] and drives
Omega_xy(t) = r * sum_k a(b)_k sin((2k-1) w_s t) exp(-(t - T_s/4)^2 / 2 sigma^2)
with w_s = 2 pi / T_s; the normalization r caps the quadrature peak at
Omega_0 on the slice grid. The full selective rotation is two such segments
with a broadband pi_x after each (the second inverted), which echoes away the
z precession of far-detuned spins.
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..constants import TWO_PI


@dataclass(frozen=True)
class SelectiveRegions:
    """Resonant-region half-width and detuned-region boundary, in Omega_0 units."""

    delta_r: float = 0.05
    delta_d: float = 1.75

    def __post_init__(self):
        if not 0 < self.delta_r < self.delta_d:
            raise ValueError("need 0 < delta_r < delta_d")


@dataclass(frozen=True)
class ShapedPulse:
    """Sine-series coefficients under a Gaussian envelope.

    `duration` is the full selective-pulse time T_s; the shaped waveform
    itself occupies each half. `sigma_env` defaults to T_s/10 when built from
    JSON. Coefficients are dimensionless (the normalization absorbs scale).
    """

    a: tuple
    b: tuple
    omega0: float
    duration: float
    sigma_env: float
    n_slices: int = 1500
    midpoint: bool = True

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))

    @property
    def base_frequency(self):
        return TWO_PI / self.duration

    @property
    def is_degenerate(self):
        return not (np.any(np.asarray(self.a)) or np.any(np.asarray(self.b)))

    def _raw_envelope(self, t):
        t = np.asarray(t, float)
        ka = np.arange(1, len(self.a) + 1)
        kb = np.arange(1, len(self.b) + 1)
        gauss = np.exp(-((t - self.duration / 4.0) ** 2) / (2.0 * self.sigma_env**2))
        sx = np.sin((2 * ka - 1) * self.base_frequency * t[..., None])
        sy = np.sin((2 * kb - 1) * self.base_frequency * t[..., None])
        return (sx @ np.asarray(self.a)) * gauss, (sy @ np.asarray(self.b)) * gauss

    def slice_times(self, n_slices=None):
        n = n_slices or self.n_slices
        dt = (self.duration / 2.0) / n
        j = np.arange(1, n + 1)
        return ((j - 0.5) * dt if self.midpoint else j * dt), dt

    def normalization(self, n_slices=None):
        """r = Omega_0 over the quadrature peak, found on the slice grid."""
        if self.is_degenerate:
            warnings.warn("all-zero coefficients: returning zero field")
            return 0.0
        t, _ = self.slice_times(n_slices)
        ox, oy = self._raw_envelope(t)
        return self.omega0 / float(np.max(np.hypot(ox, oy)))

    def envelope(self, t, n_slices=None):
        """Normalized (Omega_x, Omega_y) at time t within [0, T_s/2]."""
        r = self.normalization(n_slices)
        ox, oy = self._raw_envelope(t)
        return r * ox, r * oy

    def waveform(self, n_slices=None):
        """Sampled normalized components on the slice grid: (O_x, O_y, dt)."""
        t, dt = self.slice_times(n_slices)
        ox, oy = self.envelope(t, n_slices)
        return ox, oy, dt

    def half_unitary(self, delta=0.0, eps=0.0, n_slices=None):
        """Propagator of one shaped segment under the single-spin model.

        H(t) = (delta Omega_0 / 2) sigma_z
             + ((1+eps)/2)(Omega_x sigma_x + Omega_y sigma_y),
        with delta the detuning in units of Omega_0. Error coordinates may be
        arrays (broadcast together).
        """
        ox, oy, dt = self.waveform(n_slices)
        delta = np.asarray(delta, float)
        eps = np.asarray(eps, float)
        shape = np.broadcast(delta, eps).shape
        d = np.broadcast_to(delta, shape).ravel()
        e = np.broadcast_to(eps, shape).ravel()
        hx = 0.5 * (1.0 + e)[:, None] * (ox * dt)[None, :]
        hy = 0.5 * (1.0 + e)[:, None] * (oy * dt)[None, :]
        hz = 0.5 * (d * self.omega0 * dt)[:, None] * np.ones_like(ox)[None, :]
        u = kernels.su2_chain_batch(hx, hy, hz)
        return u.reshape(shape + (2, 2)) if shape else u[0]

    def hamiltonian_stacks(self, delta=0.0, eps=0.0, n_slices=None):
        """(H0 stack, H_eps stack, dt) of one segment, for derivative work."""
        sx = np.array([[0, 1], [1, 0]], complex)
        sy = np.array([[0, -1j], [1j, 0]], complex)
        sz = np.array([[1, 0], [0, -1]], complex)
        ox, oy, dt = self.waveform(n_slices)
        drive = 0.5 * (ox[:, None, None] * sx + oy[:, None, None] * sy)
        h0 = 0.5 * delta * self.omega0 * sz + (1.0 + eps) * drive
        return h0, drive, dt


def shaped_envelope(pulse, t):
    """Normalized field components of `pulse` at time t (spec operation)."""
    return pulse.envelope(t)


def selective_composite_unitary(shaped, delta=0.0, eps=0.0, broadband=None, n_slices=None):
    """Full selective rotation: bb^-1 . U_half . bb . U_half.

    `broadband` None means an ideal pi_x; a CompositePulse is evaluated at the
    shared physical offset delta * Omega_0 / Omega_b and the same eps.
    """
    uh = shaped.half_unitary(delta, eps, n_slices)
    if broadband is None:
        bb = np.array([[0, -1j], [-1j, 0]], complex)  # exp(-i pi sx / 2)
        bbi = bb.conj().T
        if uh.ndim > 2:
            shape = uh.shape[:-2]
            bb = np.broadcast_to(bb, shape + (2, 2))
            bbi = np.broadcast_to(bbi, shape + (2, 2))
    else:
        delta_b = np.asarray(delta, float) * shaped.omega0 / broadband.rabi
        bb = broadband.unitary(delta_b, eps)
        inv = type(broadband)(
            phases=broadband.phases,
            rabi=broadband.rabi,
            kind=broadband.kind,
            nutation=broadband.nutation,
            global_phase=broadband.global_phase + np.pi,
        )
        bbi = inv.unitary(delta_b, eps)
    return bbi @ uh @ bb @ uh


def shaped_to_json(pulse):
    return {
        "kind": "shaped",
        "a": list(pulse.a),
        "b": list(pulse.b),
        "omega0_MHz": pulse.omega0 / (TWO_PI * 1e6),
        "area_pi_units": pulse.omega0 * pulse.duration / np.pi,
        "sigma_env_fraction": pulse.sigma_env / pulse.duration,
        "n_slices": pulse.n_slices,
    }


def shaped_from_json(cfg, n_slices=None):
    if isinstance(cfg, str):
        try:
            cfg = json.loads(cfg)
        except json.JSONDecodeError:
            with open(cfg) as fh:
                cfg = json.load(fh)
    omega0 = TWO_PI * 1e6 * float(cfg["omega0_MHz"])
    if "T_s_us" in cfg:
        duration = 1e-6 * float(cfg["T_s_us"])
    else:
        duration = np.pi * float(cfg.get("area_pi_units", 24.0)) / omega0
    return ShapedPulse(
        a=tuple(cfg["a"]),
        b=tuple(cfg["b"]),
        omega0=omega0,
        duration=duration,
        sigma_env=duration * float(cfg.get("sigma_env_fraction", 0.1)),
        n_slices=int(n_slices if n_slices is not None else cfg.get("n_slices", 1500)),
    )

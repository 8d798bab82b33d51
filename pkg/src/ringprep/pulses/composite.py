"""Composite broadband pulses: palindromic rectangular-segment rotations.

A pi-type pulse with phases (phi_1 .. phi_n) expands to the 2n-1 segment
train pi_{phi_1} .. pi_{phi_n} .. pi_{phi_1}; the pi/2 type replaces the
outermost pair with nutation-angle segments. Each segment evolves under
H = (delta Omega_b / 2) sigma_z + (Omega_b (1+eps) / 2) sigma_phi for a time
angle / Omega_b, so the error coordinates enter through the dimensionless
pair (delta, eps) only.
"""

import json
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..constants import TWO_PI


@dataclass(frozen=True)
class CompositePulse:
    """Phase list plus Rabi amplitude; `kind` is 'pi' or 'pi_half'."""

    phases: tuple
    rabi: float
    kind: str = "pi"
    nutation: float = np.pi  # outer-segment angle for kind='pi_half'
    global_phase: float = 0.0

    def __post_init__(self):
        if self.kind not in ("pi", "pi_half"):
            raise ValueError("kind must be 'pi' or 'pi_half'")
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))

    @property
    def n_phases(self):
        return len(self.phases)

    def segments(self):
        """Palindromic (angle, axis phase) expansion, first segment first."""
        ph = [p + self.global_phase for p in self.phases]
        if self.kind == "pi":
            angles = [np.pi] * len(ph)
        else:
            angles = [self.nutation] + [np.pi] * (len(ph) - 1)
        ph = ph + ph[-2::-1]
        angles = angles + angles[-2::-1]
        return np.asarray(angles), np.asarray(ph)

    @property
    def duration(self):
        angles, _ = self.segments()
        return float(angles.sum() / self.rabi)

    def target(self):
        """Ideal rotation this pulse approximates."""
        angle = np.pi if self.kind == "pi" else np.pi / 2.0
        axis = self.global_phase
        sx = np.array([[0, 1], [1, 0]], complex)
        sy = np.array([[0, -1j], [1j, 0]], complex)
        gen = np.cos(axis) * sx + np.sin(axis) * sy
        return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * gen

    def unitary(self, delta=0.0, eps=0.0):
        """Propagator at the given error coordinates; both may be arrays."""
        delta = np.asarray(delta, float)
        eps = np.asarray(eps, float)
        shape = np.broadcast(delta, eps).shape
        d = np.broadcast_to(delta, shape).ravel()
        e = np.broadcast_to(eps, shape).ravel()
        angles, ph = self.segments()
        half = angles[None, :] / 2.0
        hx = half * (1.0 + e[:, None]) * np.cos(ph)[None, :]
        hy = half * (1.0 + e[:, None]) * np.sin(ph)[None, :]
        hz = half * d[:, None]
        u = kernels.su2_chain_batch(hx, hy, hz)
        return u.reshape(shape + (2, 2)) if shape else u[0]


def composite_unitary(pulse, delta=0.0, eps=0.0):
    """Module-level alias used by scans and the CLI."""
    return pulse.unitary(delta, eps)


def pulse_to_json(pulse):
    d = {
        "kind": f"composite_{pulse.kind}",
        "phases_pi_units": [p / np.pi for p in pulse.phases],
        "rabi_MHz": pulse.rabi / (TWO_PI * 1e6),
    }
    if pulse.kind == "pi_half":
        d["nutation_pi_units"] = pulse.nutation / np.pi
    if pulse.global_phase:
        d["global_phase_pi_units"] = pulse.global_phase / np.pi
    return d


def pulse_from_json(cfg):
    if isinstance(cfg, str):
        try:
            cfg = json.loads(cfg)
        except json.JSONDecodeError:
            with open(cfg) as fh:
                cfg = json.load(fh)
    kind = cfg["kind"].replace("composite_", "")
    return CompositePulse(
        phases=tuple(np.pi * np.asarray(cfg["phases_pi_units"], float)),
        rabi=TWO_PI * 1e6 * float(cfg.get("rabi_MHz", 30.0)),
        kind=kind,
        nutation=np.pi * float(cfg.get("nutation_pi_units", 1.0)),
        global_phase=np.pi * float(cfg.get("global_phase_pi_units", 0.0)),
    )


def error_hamiltonian_stacks(pulse, delta=0.0, eps=0.0):
    """Per-segment H0 and the two error generators (for derivative checks).

    Segments are rectangular, so each 'slice' is one segment of duration
    angle / rabi; returns (h0_stack, h_delta_stack, h_eps_stack, durations).
    """
    sx = np.array([[0, 1], [1, 0]], complex)
    sy = np.array([[0, -1j], [1j, 0]], complex)
    sz = np.array([[1, 0], [0, -1]], complex)
    angles, ph = pulse.segments()
    h0, hd, he = [], [], []
    for ang, phi in zip(angles, ph):
        axis = np.cos(phi) * sx + np.sin(phi) * sy
        h0.append(0.5 * delta * pulse.rabi * sz + 0.5 * pulse.rabi * (1 + eps) * axis)
        hd.append(0.5 * pulse.rabi * sz)
        he.append(0.5 * pulse.rabi * axis)
    return np.stack(h0), np.stack(hd), np.stack(he), angles / pulse.rabi

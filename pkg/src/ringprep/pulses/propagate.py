"""Piecewise-constant propagation of time-dependent Hamiltonians.

The time-ordered exponential over [0, T] is approximated by N_T slices, each
exponentiated exactly; the Hamiltonian is sampled at the slice midpoint by
default (second-order accurate) or at the right endpoint t_j = j T / N_T.
"""

import numpy as np


def slice_grid(total_time, n_slices, midpoint=True):
    """Sample times and slice width. Right-endpoint grid is t_j = j T / N."""
    if n_slices < 1:
        raise ValueError("need at least one slice")
    dt = total_time / n_slices
    j = np.arange(1, n_slices + 1)
    t = (j - 0.5) * dt if midpoint else j * dt
    return t, dt


def _as_stack(hamiltonian, times):
    if callable(hamiltonian):
        return np.stack([np.asarray(hamiltonian(t), complex) for t in times])
    stack = np.asarray(hamiltonian, complex)
    if stack.ndim == 2:
        stack = np.broadcast_to(stack, (len(times),) + stack.shape)
    if stack.shape[0] != len(times):
        raise ValueError("Hamiltonian stack length must match the slice count")
    return stack


def expm_hermitian(h, t):
    """exp(-i h t) for a Hermitian stack (..., d, d) via eigendecomposition."""
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * w * t)
    return (v * phases[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def propagate_piecewise(hamiltonian, total_time, n_slices, midpoint=True, chunk=256):
    """Product of slice exponentials of a (possibly time-dependent) Hamiltonian.

    `hamiltonian` is a callable t -> (d, d) Hermitian array, a constant
    matrix, or a precomputed (N_T, d, d) stack matching the slice grid.
    """
    times, dt = slice_grid(total_time, n_slices, midpoint)
    stack = _as_stack(hamiltonian, times)
    if not np.all(np.isfinite(stack)):
        raise ValueError("non-finite Hamiltonian entries")
    dim = stack.shape[-1]
    u = np.eye(dim, dtype=complex)
    for start in range(0, n_slices, chunk):
        block = expm_hermitian(stack[start : start + chunk], dt)
        for k in range(block.shape[0]):
            u = block[k] @ u
    return u


def propagate_states(hamiltonian, total_time, n_slices, psi, midpoint=True):
    """Apply the sliced propagator to state columns without forming it."""
    times, dt = slice_grid(total_time, n_slices, midpoint)
    stack = _as_stack(hamiltonian, times)
    psi = np.asarray(psi, complex)
    for k in range(n_slices):
        w, v = np.linalg.eigh(stack[k])
        amp = v.conj().T @ psi
        phases = np.exp(-1j * w * dt)
        psi = v @ (phases[:, None] * amp if amp.ndim == 2 else phases * amp)
    return psi

"""NumPy fallback for the SU(2) chain kernels, API-identical to _su2core."""

import numpy as np


def su2_exp_batch(hx, hy, hz):
    """exp(-i(hx X + hy Y + hz Z)) elementwise; returns (..., 2, 2)."""
    hx, hy, hz = np.broadcast_arrays(hx, hy, hz)
    a = np.sqrt(hx * hx + hy * hy + hz * hz)
    safe = np.where(a > 1e-300, a, 1.0)
    s = np.where(a > 1e-300, np.sin(safe) / safe, 1.0)
    c = np.cos(a)
    out = np.empty(np.shape(a) + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = c - 1j * s * hz
    out[..., 0, 1] = -1j * s * hx - s * hy
    out[..., 1, 0] = -1j * s * hx + s * hy
    out[..., 1, 1] = c + 1j * s * hz
    return out


def su2_chain(hx, hy, hz):
    """Product of slice exponentials, slice 0 acting first."""
    return su2_chain_batch(
        np.asarray(hx, float)[None, :],
        np.asarray(hy, float)[None, :],
        np.asarray(hz, float)[None, :],
    )[0]


def su2_chain_batch(hx, hy, hz):
    """Row-wise chain product: (m, n) components -> (m, 2, 2)."""
    hx = np.asarray(hx, float)
    hy = np.asarray(hy, float)
    hz = np.asarray(hz, float)
    m, n = hx.shape
    steps = su2_exp_batch(hx, hy, hz)
    u = np.broadcast_to(np.eye(2, dtype=np.complex128), (m, 2, 2)).copy()
    for k in range(n):
        u = steps[:, k] @ u
    return u

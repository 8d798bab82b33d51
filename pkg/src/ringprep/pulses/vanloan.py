"""Exact propagator derivatives from block-matrix (Dyson-integral) exponentials.

Stacking the Hamiltonian with k copies of a perturbation in an upper-
triangular block generator makes the time-ordered exponential carry the
ordered Dyson integrals in its top row; the k-th parametric derivative of the
propagator at zero perturbation strength is k! times the top-right block.
"""

import numpy as np
from scipy.linalg import expm

from .propagate import _as_stack, slice_grid


def _fact(k):
    out = 1.0
    for q in range(2, k + 1):
        out *= q
    return out


def _block_generator(h0, perts, dt):
    """-i dt [[H0, A1, 0..], [0, H0, A2..], ..] for one slice."""
    k = len(perts)
    d = h0.shape[0]
    gen = np.zeros(((k + 1) * d, (k + 1) * d), dtype=complex)
    for q in range(k + 1):
        gen[q * d : (q + 1) * d, q * d : (q + 1) * d] = h0
    for q, a in enumerate(perts):
        gen[q * d : (q + 1) * d, (q + 1) * d : (q + 2) * d] = a
    return -1j * dt * gen


def chain_exponential(h0_stack, pert_stacks, durations):
    """Sliced product of block exponentials; returns (U0, top-right block).

    All diagonal blocks of each slice exponential equal the slice propagator,
    so the accumulated diagonal is U0(T).
    """
    k = len(pert_stacks)
    d = h0_stack.shape[-1]
    acc = np.eye((k + 1) * d, dtype=complex)
    for j in range(h0_stack.shape[0]):
        gen = _block_generator(h0_stack[j], [p[j] for p in pert_stacks], durations[j])
        acc = expm(gen) @ acc
    return acc[:d, :d].copy(), acc[:d, k * d :].copy()


def van_loan_segments(h0_stack, perturbation_stacks, durations, order=1):
    """Derivatives for an explicit slice decomposition (possibly uneven).

    For one perturbation, returns d^j U / d eps^j for j = 1..order; for two,
    the first derivatives and the mixed second derivative
    (d/d eps_0)(d/d eps_1) U, which sums both operator orderings.
    """
    durations = np.asarray(durations, float)
    derivs = {}
    if len(perturbation_stacks) == 1:
        pert = perturbation_stacks[0]
        u0 = None
        for k in range(1, order + 1):
            u0, top = chain_exponential(h0_stack, [pert] * k, durations)
            derivs[("0",) * k] = _fact(k) * top
    elif len(perturbation_stacks) == 2:
        pa, pb = perturbation_stacks
        u0, top_a = chain_exponential(h0_stack, [pa], durations)
        _, top_b = chain_exponential(h0_stack, [pb], durations)
        _, mixed_ab = chain_exponential(h0_stack, [pa, pb], durations)
        _, mixed_ba = chain_exponential(h0_stack, [pb, pa], durations)
        derivs[("0",)] = top_a
        derivs[("1",)] = top_b
        derivs[("0", "1")] = mixed_ab + mixed_ba
    else:
        raise ValueError("give one perturbation (any order) or two (mixed)")
    return u0, derivs


def van_loan_derivatives(h0, perturbations, total_time, n_slices, order=1, midpoint=True):
    """Grid-sliced derivatives of the propagator of a time-dependent H0.

    `h0` and each perturbation may be a callable t -> (d, d), a constant
    matrix, or a precomputed (N_T, d, d) stack on the slice grid.
    """
    times, dt = slice_grid(total_time, n_slices, midpoint)
    h0_stack = _as_stack(h0, times)
    pert_stacks = [_as_stack(p, times) for p in perturbations]
    return van_loan_segments(h0_stack, pert_stacks, np.full(n_slices, dt), order=order)


def chain_first_derivative(h0_stack, pert_stack, durations):
    """Fast (U0, dU/d eps) via per-slice Frechet blocks of Hermitian slices.

    Equivalent to the order-1 block exponential but using eigendecompositions,
    vectorized over slices.
    """
    durations = np.asarray(durations, float)
    w, v = np.linalg.eigh(h0_stack)
    dts = durations[:, None]
    phases = np.exp(-1j * w * dts)
    lam_i = w[..., :, None]
    lam_j = w[..., None, :]
    diff = lam_j - lam_i
    dts2 = durations[:, None, None]
    small = np.abs(diff * dts2) < 1e-12
    safe = np.where(small, 1.0, diff)
    gamma = np.where(
        small,
        dts2 * np.exp(-1j * lam_i * dts2),
        (np.exp(-1j * lam_i * dts2) - np.exp(-1j * lam_j * dts2)) / (1j * safe),
    )
    vh = np.swapaxes(v.conj(), -1, -2)
    pert_eig = vh @ pert_stack @ v
    frechet = v @ (-1j * pert_eig * gamma) @ vh
    slice_u = (v * phases[..., None, :]) @ vh
    u = np.eye(h0_stack.shape[-1], dtype=complex)
    deriv = np.zeros_like(u)
    for k in range(h0_stack.shape[0]):
        deriv = slice_u[k] @ deriv + frechet[k] @ u
        u = slice_u[k] @ u
    return u, deriv

"""Cluster-state targets and stabilizer checks."""

import numpy as np

from ..constants import SIGMA_X, SIGMA_Z
from ..spin_system import sigma_z_diag


def ring_adjacency(n_spins):
    """NN pairs (1-based, sorted) around the ring."""
    return [tuple(sorted((i, i % n_spins + 1))) for i in range(1, n_spins + 1)]


def cluster_target_diag(adjacency, n_spins):
    """Diagonal of prod_{<ij>} exp(-i pi/4 sz_i sz_j) as a phase vector."""
    adjacency = list(adjacency)
    if not adjacency:
        raise ValueError("adjacency must be nonempty")
    phase = np.zeros(2**n_spins)
    for (i, j) in adjacency:
        phase += np.pi / 4.0 * sigma_z_diag(i, n_spins) * sigma_z_diag(j, n_spins)
    return np.exp(-1j * phase)


def plus_state(n_spins):
    dim = 2**n_spins
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)


def _op_on(op, site, n_spins):
    out = np.array([[1.0 + 0j]])
    for q in range(1, n_spins + 1):
        out = np.kron(out, op if q == site else np.eye(2, dtype=complex))
    return out


def stabilizer_operators(adjacency, n_spins):
    """K_i = X_i prod_{j in nbr(i)} Z_j for the given graph."""
    neighbors = {i: [] for i in range(1, n_spins + 1)}
    for (i, j) in adjacency:
        neighbors[i].append(j)
        neighbors[j].append(i)
    ops = []
    for i in range(1, n_spins + 1):
        k = _op_on(SIGMA_X, i, n_spins)
        for j in neighbors[i]:
            k = k @ _op_on(SIGMA_Z, j, n_spins)
        ops.append(k)
    return ops


def compensating_rotations_diag(adjacency, n_spins):
    """Local z phases restoring the controlled-Z product from the ZZ target.

    Multiplying the prepared state U_t |+..+> elementwise by this diagonal
    yields the stabilizer cluster state (up to global phase): one z rotation
    of angle n_i pi/2 per spin, n_i its neighbor count, with the sign fixed by
    the sigma_z |0> = +|0> convention (verified against the brute-force
    controlled-Z product).
    """
    neighbors = {i: 0 for i in range(1, n_spins + 1)}
    for (i, j) in adjacency:
        neighbors[i] += 1
        neighbors[j] += 1
    phase = np.zeros(2**n_spins)
    for i in range(1, n_spins + 1):
        phase += neighbors[i] * np.pi / 4.0 * sigma_z_diag(i, n_spins)
    return np.exp(1j * phase)

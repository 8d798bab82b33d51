"""Electron register coupled to one carbon-13 per site (2^(2N) model).

The total Hamiltonian is H_z on the electrons plus, per site,
-gamma_c B_z I_z + (sigma_z + 1)/2 a.I with the hyperfine vector a from the
point-dipole tensor at displacement r_c e_hat. Everything nuclear is
block-diagonal in the electron z basis, so free evolution factorizes into
per-config 2x2 nuclear propagators.
"""

import numpy as np

from .constants import HYPERFINE_SCALE_NM3, SIGMA_X, SIGMA_Y, SIGMA_Z
from .spin_system import LevelModel, hamiltonian_zz, sigma_z_diag

_PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


def hyperfine_vector(r_c_nm, e_hat):
    """Point-dipole hyperfine vector a (rad/s) for S^z I coupling.

    a_alpha = C / r^3 (delta_{z alpha} - 3 e_z e_alpha), the z row of the
    dipolar tensor along the common NV axis.
    """
    e = np.asarray(e_hat, float)
    if abs(np.linalg.norm(e) - 1.0) > 1e-9:
        raise ValueError("e_hat must be a unit vector")
    if r_c_nm <= 0:
        raise ValueError("nuclear distance must be positive")
    zrow = np.array([0.0, 0.0, 1.0]) - 3.0 * e[2] * e
    return HYPERFINE_SCALE_NM3 / r_c_nm**3 * zrow


def hyperfine_vectors(system, r_c_nm=None):
    params = system.params
    r_c = params.r_c_nm if r_c_nm is None else r_c_nm
    if not params.unit_vectors:
        raise ValueError("system carries no nuclear unit vectors")
    return np.stack([hyperfine_vector(r_c, e) for e in params.unit_vectors])


def nuclear_site_hamiltonians(system, r_c_nm=None):
    """(N, 2, 2, 2) array: per site, per electron z in (+1, -1), the 2x2 H."""
    params = system.params
    avecs = hyperfine_vectors(system, r_c_nm)
    n = system.n_spins
    out = np.zeros((n, 2, 2, 2), dtype=complex)
    zeeman = -params.gamma_c * params.B_z * SIGMA_Z / 2.0
    for i in range(n):
        coupling = np.tensordot(avecs[i], _PAULI, axes=(0, 0)) / 2.0
        out[i, 0] = zeeman + coupling  # sigma_z = +1: (z+1)/2 = 1
        out[i, 1] = zeeman  # sigma_z = -1
    return out


def hamiltonian_with_nuclei(system, r_c_nm=None, include_detunings=True):
    """Dense 2^(2N) Hamiltonian (electron axes first, then nuclear axes)."""
    if system.level_model is not LevelModel.TWO_LEVEL_WITH_NUCLEI:
        raise ValueError("system is not a with-nuclei model")
    n = system.n_spins
    dim_el = 2**n
    dim = 4**n
    h = np.zeros((dim, dim), dtype=complex)
    el_diag = hamiltonian_zz(system, include_detunings=include_detunings)
    h += np.diag(np.kron(el_diag, np.ones(dim_el)))
    site_h = nuclear_site_hamiltonians(system, r_c_nm)
    for i in range(n):
        zvals = sigma_z_diag(i + 1, n)
        for sign_idx, sign in enumerate((1.0, -1.0)):
            sel = np.where(zvals == sign, 1.0, 0.0)
            nuc_op = np.array([[1.0 + 0j]])
            for q in range(n):
                nuc_op = np.kron(nuc_op, site_h[i, sign_idx] if q == i else np.eye(2))
            h += np.kron(np.diag(sel).astype(complex), nuc_op)
    return h


def secular_hamiltonian_with_nuclei(system, r_c_nm=None, include_detunings=True):
    """Rotating-wave limit: only the a_z (sigma_z I_z + I_z)/2 part survives."""
    n = system.n_spins
    avecs = hyperfine_vectors(system, r_c_nm)
    dim_el = 2**n
    el_diag = hamiltonian_zz(system, include_detunings=include_detunings)
    diag = np.kron(el_diag, np.ones(dim_el))
    for i in range(n):
        z_el = np.kron(sigma_z_diag(i + 1, n), np.ones(dim_el))
        z_nuc = np.kron(np.ones(dim_el), sigma_z_diag(i + 1, n))
        diag = diag + avecs[i][2] / 2.0 * (z_el * z_nuc / 2.0 + z_nuc / 2.0)
    return np.diag(diag.astype(complex))

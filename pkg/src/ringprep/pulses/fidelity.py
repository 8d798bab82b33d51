"""Gate fidelity conventions shared by pulses and protocol checks."""

import numpy as np


def gate_fidelity(unitary, target):
    """|Tr(target^dag U)| / dim, broadcast over leading axes of `unitary`.

    The modulus makes the measure insensitive to global phase.
    """
    unitary = np.asarray(unitary)
    target = np.asarray(target)
    dim = target.shape[-1]
    return np.abs(np.einsum("ij,...ji->...", target.conj().T, unitary)) / dim


def gate_infidelity(unitary, target):
    return 1.0 - gate_fidelity(unitary, target)


def assert_unitary(u, tol=1e-10):
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    err = np.max(np.abs(np.swapaxes(u.conj(), -1, -2) @ u - eye))
    if err > tol:
        raise ValueError(f"matrix is not unitary within {tol} (defect {err:.2e})")
    return u

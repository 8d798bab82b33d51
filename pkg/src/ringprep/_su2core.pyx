# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled SU(2) chain products, the hot kernel of piecewise pulse propagation.

Each slice generator is given by its Pauli components (hx, hy, hz), already
multiplied by the slice duration; the kernel accumulates
U = exp(-i h_n.sigma) ... exp(-i h_1.sigma) with slice 1 acting first.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()


cdef inline void _accumulate(double complex* u, const double* hx,
                             const double* hy, const double* hz,
                             Py_ssize_t n) noexcept nogil:
    cdef double complex u00 = 1.0, u01 = 0.0, u10 = 0.0, u11 = 1.0
    cdef double complex e00, e01, e10, e11, n00, n01, n10, n11
    cdef double a, c, s
    cdef Py_ssize_t k
    for k in range(n):
        a = sqrt(hx[k] * hx[k] + hy[k] * hy[k] + hz[k] * hz[k])
        if a > 1e-300:
            c = cos(a)
            s = sin(a) / a
        else:
            c = 1.0
            s = 1.0
        # exp(-i h.sigma) = cos(a) I - i sin(a)/a (hx X + hy Y + hz Z)
        e00 = c - 1j * s * hz[k]
        e11 = c + 1j * s * hz[k]
        e01 = -1j * s * hx[k] - s * hy[k]
        e10 = -1j * s * hx[k] + s * hy[k]
        n00 = e00 * u00 + e01 * u10
        n01 = e00 * u01 + e01 * u11
        n10 = e10 * u00 + e11 * u10
        n11 = e10 * u01 + e11 * u11
        u00 = n00
        u01 = n01
        u10 = n10
        u11 = n11
    u[0] = u00
    u[1] = u01
    u[2] = u10
    u[3] = u11


def su2_chain(cnp.ndarray[double, ndim=1] hx,
              cnp.ndarray[double, ndim=1] hy,
              cnp.ndarray[double, ndim=1] hz):
    """Product of slice exponentials for one generator sequence."""
    cdef Py_ssize_t n = hx.shape[0]
    if hy.shape[0] != n or hz.shape[0] != n:
        raise ValueError("component arrays must share a length")
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((2, 2), dtype=np.complex128)
    hx = np.ascontiguousarray(hx)
    hy = np.ascontiguousarray(hy)
    hz = np.ascontiguousarray(hz)
    _accumulate(<double complex*> out.data, <const double*> hx.data,
                <const double*> hy.data, <const double*> hz.data, n)
    return out


def su2_chain_batch(cnp.ndarray[double, ndim=2] hx,
                    cnp.ndarray[double, ndim=2] hy,
                    cnp.ndarray[double, ndim=2] hz):
    """Row-wise su2_chain: (m, n) component arrays -> (m, 2, 2) unitaries."""
    cdef Py_ssize_t m = hx.shape[0], n = hx.shape[1]
    if hy.shape[0] != m or hz.shape[0] != m or hy.shape[1] != n or hz.shape[1] != n:
        raise ValueError("component arrays must share a shape")
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] out = np.empty((m, 2, 2), dtype=np.complex128)
    hx = np.ascontiguousarray(hx)
    hy = np.ascontiguousarray(hy)
    hz = np.ascontiguousarray(hz)
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            _accumulate((<double complex*> out.data) + 4 * i,
                        (<const double*> hx.data) + n * i,
                        (<const double*> hy.data) + n * i,
                        (<const double*> hz.data) + n * i, n)
    return out

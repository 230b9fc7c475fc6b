# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-spin product for spin-bath decoherence factors."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()


def bath_factor_grid(double[:, ::1] couplings, double[::1] bias, double zeeman, double[::1] times):
    cdef Py_ssize_t n = couplings.shape[0]
    cdef Py_ssize_t m = times.shape[0]
    cdef Py_ssize_t i, k
    cdef double t, ca, sa, ca2, sa2, cb, sb, cb2, sb2, hz, re, im
    cdef double cre, cim, dre, dim, tmp
    if bias.shape[0] != n:
        raise ValueError("bias length must match number of spins")
    out_c = np.empty(m, dtype=np.complex128)
    out_d = np.empty(m, dtype=np.complex128)
    omega_arr = np.empty(n)
    mz_arr = np.empty(n)
    cdef double[::1] omega = omega_arr
    cdef double[::1] mz = mz_arr
    cdef double complex[::1] oc = out_c
    cdef double complex[::1] od = out_d
    with nogil:
        for k in range(n):
            hz = zeeman + couplings[k, 2]
            omega[k] = sqrt(couplings[k, 0] * couplings[k, 0] + couplings[k, 1] * couplings[k, 1] + hz * hz)
            mz[k] = hz / omega[k] if omega[k] > 0.0 else 0.0
        for i in range(m):
            t = times[i]
            # shared Zeeman angle; the 2t values follow from double-angle identities
            ca = cos(0.5 * zeeman * t)
            sa = sin(0.5 * zeeman * t)
            ca2 = ca * ca - sa * sa
            sa2 = 2.0 * sa * ca
            cre = 1.0
            cim = 0.0
            dre = 1.0
            dim = 0.0
            for k in range(n):
                cb = cos(0.5 * omega[k] * t)
                sb = sin(0.5 * omega[k] * t)
                re = ca * cb + mz[k] * sa * sb
                im = bias[k] * (mz[k] * sb * ca - cb * sa)
                tmp = cre * re - cim * im
                cim = cre * im + cim * re
                cre = tmp
                cb2 = cb * cb - sb * sb
                sb2 = 2.0 * sb * cb
                re = ca2 * cb2 + mz[k] * sa2 * sb2
                im = bias[k] * (mz[k] * sb2 * ca2 - cb2 * sa2)
                tmp = dre * re - dim * im
                dim = dre * im + dim * re
                dre = tmp
            oc[i].real = cre
            oc[i].imag = cim
            od[i].real = dre
            od[i].imag = dim
    return out_c, out_d

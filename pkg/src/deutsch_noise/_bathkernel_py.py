"""Numpy fallback for :mod:`deutsch_noise._bathkernel`; same signature and results."""

import numpy as np


def _spin_factors(couplings, bias, zeeman, times):
    ax, ay, az = couplings[:, 0, None], couplings[:, 1, None], couplings[:, 2, None]
    hz = zeeman + az
    omega = np.sqrt(ax * ax + ay * ay + hz * hz)
    with np.errstate(invalid="ignore", divide="ignore"):
        mz = np.where(omega > 0.0, hz / omega, 0.0)
    a = 0.5 * zeeman * times[None, :]
    b = 0.5 * omega * times[None, :]
    ca, sa, cb, sb = np.cos(a), np.sin(a), np.cos(b), np.sin(b)
    return (ca * cb + mz * sa * sb) + 1j * bias[:, None] * (mz * sb * ca - cb * sa)


def bath_factor_grid(couplings, bias, zeeman, times):
    couplings = np.ascontiguousarray(couplings, dtype=np.float64).reshape(-1, 3)
    bias = np.ascontiguousarray(bias, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    if bias.shape[0] != couplings.shape[0]:
        raise ValueError("bias length must match number of spins")
    zeeman = float(zeeman)
    c = np.prod(_spin_factors(couplings, bias, zeeman, times), axis=0)
    d = np.prod(_spin_factors(couplings, bias, zeeman, 2.0 * times), axis=0)
    return c.astype(np.complex128), d.astype(np.complex128)

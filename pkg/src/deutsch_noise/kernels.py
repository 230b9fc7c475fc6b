"""Backend selection for the spin-bath factor kernel.

The compiled extension is used when it was built; otherwise the numpy
implementation is used.  Set ``DEUTSCH_NOISE_PURE_PYTHON=1`` to force the
fallback.
"""

import os

import numpy as np

from . import _bathkernel_py

_FORCE_PURE = os.environ.get("DEUTSCH_NOISE_PURE_PYTHON", "") not in ("", "0")

try:
    if _FORCE_PURE:
        raise ImportError
    from . import _bathkernel as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def bath_factor_grid(couplings, bias, zeeman, times, backend=None):
    """Per-time products of single-spin factors at ``t`` and ``2t``.

    Parameters
    ----------
    couplings : (n, 3) array
        Hyperfine vectors (A^{z,x}, A^{z,y}, A^{z,z}) in rad/us.
    bias : (n,) array
        ``Tr[rho_k sigma_z]`` of each spin's initial state.
    zeeman : float
        Common nuclear Larmor frequency in rad/us.
    times : (m,) array
        Evolution times in us.
    backend : {"cython", "python"}, optional
        Override the import-time choice.

    Returns
    -------
    c, d2_factor : (m,) complex arrays
    """
    backend = backend or BACKEND
    couplings = np.ascontiguousarray(couplings, dtype=np.float64).reshape(-1, 3)
    bias = np.ascontiguousarray(bias, dtype=np.float64).ravel()
    times = np.ascontiguousarray(times, dtype=np.float64).ravel()
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        return _compiled.bath_factor_grid(couplings, bias, float(zeeman), times)
    if backend == "python":
        return _bathkernel_py.bath_factor_grid(couplings, bias, zeeman, times)
    raise ValueError(f"unknown backend {backend!r}")

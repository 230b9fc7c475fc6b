"""Dense complex matrix helpers sized for small joint Hilbert spaces.

Every operator in the package (states, gates, propagators) is a square
``complex128`` numpy array.  Units: hbar = 1, angular frequencies in rad/us,
times in us.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-9
UNITARY_TOL = 1e-9

_dim_cap = 4096


class ValidationError(ValueError):
    """Raised when an input violates an operator or state precondition."""


class CapacityError(ValueError):
    """Raised when a Hilbert-space dimension would exceed the configured cap."""


def get_dim_cap() -> int:
    return _dim_cap


def set_dim_cap(cap: int) -> int:
    """Set the maximum allowed matrix dimension; returns the previous cap."""
    global _dim_cap
    if int(cap) < 1:
        raise ValueError("dimension cap must be positive")
    previous, _dim_cap = _dim_cap, int(cap)
    return previous


def check_dim(dim: int) -> None:
    if dim > _dim_cap:
        raise CapacityError(f"dimension {dim} exceeds cap {_dim_cap}")


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a square, finite complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def hermiticity_error(h: np.ndarray) -> float:
    """Max entry of |h - h^dagger| relative to the max entry of |h|."""
    scale = float(np.max(np.abs(h)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(h - dagger(h)))) / scale


def unitarity_error(u: np.ndarray) -> float:
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))))


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return unitarity_error(u) <= tol


def tensor(a, b) -> np.ndarray:
    """Kronecker product, ``a``-major block order."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    check_dim(a.shape[0] * b.shape[0])
    return np.kron(a, b)


def tensor_all(factors: Iterable) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for f in factors:
        out = tensor(out, f)
    return out


def herm_expm(h, scale: float) -> np.ndarray:
    """Return ``exp(-1j * scale * h)`` for Hermitian ``h``.

    The generator is symmetrized after validation and exponentiated through
    its eigendecomposition, so the result is unitary to machine precision.

    Raises
    ------
    ValidationError
        If ``h`` is not Hermitian within ``HERMITIAN_TOL`` (relative).
    """
    h = as_matrix(h, "h")
    if hermiticity_error(h) > HERMITIAN_TOL:
        raise ValidationError("generator is not Hermitian")
    h = 0.5 * (h + dagger(h))
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-1j * float(scale) * evals)
    return (evecs * phases) @ dagger(evecs)


def _check_dims(dim: int, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise ValidationError(f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != dim:
        raise ValidationError(f"subsystem dimensions {dims} do not multiply to {dim}")
    return dims


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every factor whose index is not in ``keep``.

    Kept factors stay in their original order.
    """
    m = as_matrix(m, "m")
    dims = _check_dims(m.shape[0], dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise ValidationError(f"keep must be a nonempty subset of 0..{len(dims) - 1}")
    n = len(dims)
    t = m.reshape(dims + dims)
    # einsum labels: row indices 0..n-1, column indices n..2n-1; traced pairs share a label
    row = list(range(n))
    col = [i if i not in keep else n + i for i in range(n)]
    out = keep + [n + i for i in keep]
    reduced = np.einsum(t, row + col, out)
    d_keep = int(np.prod([dims[k] for k in keep]))
    return reduced.reshape(d_keep, d_keep)

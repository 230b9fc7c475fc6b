"""Density matrices over tensor-product spaces, with unitary, Kraus and
projective-measurement updates."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .linalg import (
    HERMITIAN_TOL,
    UNITARY_TOL,
    ValidationError,
    as_matrix,
    check_dim,
    dagger,
    hermiticity_error,
    partial_trace,
    unitarity_error,
)

TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9
P_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated physical state on the factors ``dims``.

    The backing array is made read-only; operations return new instances.
    """

    mat: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.array(as_matrix(self.mat, "state"), copy=True)
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims) or int(np.prod(dims)) != mat.shape[0]:
            raise ValidationError(f"dims {dims} do not match state dimension {mat.shape[0]}")
        check_dim(mat.shape[0])
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)
        self.validate()

    @classmethod
    def _trusted(cls, mat: np.ndarray, dims: tuple[int, ...]) -> "DensityMatrix":
        # outputs of unitary/Kraus/projective updates on a valid state;
        # skips the O(d^3) eigenvalue check
        obj = object.__new__(cls)
        mat = np.ascontiguousarray(mat, dtype=np.complex128)
        mat.setflags(write=False)
        object.__setattr__(obj, "mat", mat)
        object.__setattr__(obj, "dims", tuple(dims))
        return obj

    def validate(self) -> None:
        """Raise ``ValidationError`` unless Hermitian, unit-trace and PSD."""
        mat = self.mat
        if hermiticity_error(mat) > HERMITIAN_TOL:
            raise ValidationError("state is not Hermitian")
        tr = np.trace(mat)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"state trace {tr} differs from 1")
        # clipping of tiny negative eigenvalues applies to this check only
        lowest = float(np.linalg.eigvalsh(0.5 * (mat + dagger(mat)))[0])
        if lowest < -POSITIVITY_TOL:
            raise ValidationError(f"state has negative eigenvalue {lowest:.3e}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_ket(cls, ket, dims: Sequence[int]) -> "DensityMatrix":
        v = np.asarray(ket, dtype=np.complex128).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), tuple(dims))

    @classmethod
    def basis(cls, bits: Sequence[int], dims: Sequence[int] | None = None) -> "DensityMatrix":
        """Computational basis projector, e.g. ``basis([0, 1])`` is |01><01|."""
        dims = tuple(dims) if dims is not None else (2,) * len(bits)
        idx = int(np.ravel_multi_index(tuple(bits), dims))
        v = np.zeros(int(np.prod(dims)), dtype=np.complex128)
        v[idx] = 1.0
        return cls.from_ket(v, dims)

    def product(self, other: "DensityMatrix") -> "DensityMatrix":
        """Tensor product ``self (x) other`` with concatenated dims."""
        check_dim(self.dim * other.dim)
        return DensityMatrix(np.kron(self.mat, other.mat), self.dims + other.dims)

    def reduced(self, keep: Iterable[int]) -> "DensityMatrix":
        keep = sorted(set(keep))
        return DensityMatrix(partial_trace(self.mat, self.dims, keep), tuple(self.dims[k] for k in keep))

    def probability(self, target: int, outcome: int) -> float:
        """Born probability of ``outcome`` on a qubit factor, without collapsing."""
        mask = _projector_embedded(self.dims, target, outcome)
        return float(np.real(np.sum(mask * self.mat.diagonal())))


@dataclass(frozen=True)
class MeasurementBranch:
    outcome: int
    probability: float
    post_state: DensityMatrix | None

    @property
    def negligible(self) -> bool:
        """True when the branch fell below ``P_FLOOR`` and carries no state."""
        return self.post_state is None


def _check_targets(dims: tuple[int, ...], targets) -> list[int]:
    if isinstance(targets, (int, np.integer)):
        targets = [int(targets)]
    targets = [int(t) for t in targets]
    if not targets or len(set(targets)) != len(targets):
        raise ValidationError(f"targets must be distinct and nonempty, got {targets}")
    if any(t < 0 or t >= len(dims) for t in targets):
        raise ValidationError(f"targets {targets} out of range for {len(dims)} factors")
    return targets


def _apply_left_right(mat: np.ndarray, dims, targets, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Compute ``L rho R`` where L, R act on ``targets`` (in the given order)."""
    n = len(dims)
    k = len(targets)
    tdims = [dims[t] for t in targets]
    t = mat.reshape(list(dims) + list(dims))
    lop = left.reshape(tdims + tdims)
    rop = right.reshape(tdims + tdims)
    # contract L's input axes with the targeted row axes
    t = np.tensordot(lop, t, axes=(list(range(k, 2 * k)), targets))
    t = np.moveaxis(t, list(range(k)), targets)
    # contract targeted column axes with R's output axes
    col_axes = [n + x for x in targets]
    t = np.tensordot(t, rop, axes=(col_axes, list(range(k))))
    t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), col_axes)
    d = mat.shape[0]
    return t.reshape(d, d)


def apply_unitary(state: DensityMatrix, u, targets) -> DensityMatrix:
    """Conjugate ``state`` by ``u`` acting on the factors ``targets``.

    ``u`` is ordered like ``targets``: its first tensor factor acts on
    ``targets[0]``.
    """
    targets = _check_targets(state.dims, targets)
    u = as_matrix(u, "u")
    expected = int(np.prod([state.dims[t] for t in targets]))
    if u.shape[0] != expected:
        raise ValidationError(f"unitary dimension {u.shape[0]} does not match targets ({expected})")
    if unitarity_error(u) > UNITARY_TOL:
        raise ValidationError("operator is not unitary")
    return DensityMatrix._trusted(_apply_left_right(state.mat, state.dims, targets, u, dagger(u)), state.dims)


def apply_kraus(state: DensityMatrix, ops: Sequence, targets) -> DensityMatrix:
    """Apply the operator-sum map ``rho -> sum_k K rho K^dagger`` on ``targets``."""
    targets = _check_targets(state.dims, targets)
    ops = [as_matrix(k, "Kraus operator") for k in ops]
    if not ops:
        raise ValidationError("empty Kraus set")
    expected = int(np.prod([state.dims[t] for t in targets]))
    if any(k.shape[0] != expected for k in ops):
        raise ValidationError(f"Kraus operators must be {expected}x{expected}")
    completeness = sum(dagger(k) @ k for k in ops)
    if np.max(np.abs(completeness - np.eye(expected))) > UNITARY_TOL:
        raise ValidationError("Kraus set is not trace preserving")
    out = np.zeros_like(state.mat)
    for k in ops:
        out += _apply_left_right(state.mat, state.dims, targets, k, dagger(k))
    return DensityMatrix._trusted(out, state.dims)


def _projector_embedded(dims, target: int, outcome: int) -> np.ndarray:
    """Diagonal of the projector |outcome><outcome| on ``target`` as a flat mask."""
    mask = np.zeros(dims, dtype=float)
    index = [slice(None)] * len(dims)
    index[target] = outcome
    mask[tuple(index)] = 1.0
    return mask.ravel()


def measure_qubit(state: DensityMatrix, target: int) -> list[MeasurementBranch]:
    """Exact computational-basis measurement of one qubit factor.

    Returns one branch per outcome.  Post-measurement states keep every
    other factor, environments included, without tracing anything out.
    Branches with probability below ``P_FLOOR`` carry ``post_state=None``.
    """
    (target,) = _check_targets(state.dims, [target])
    if state.dims[target] != 2:
        raise ValidationError("measured factor must be a qubit")
    branches = []
    for outcome in (0, 1):
        mask = _projector_embedded(state.dims, target, outcome)
        projected = state.mat * np.outer(mask, mask)
        p = float(np.real(np.trace(projected)))
        p = min(max(p, 0.0), 1.0)
        post = DensityMatrix._trusted(projected / p, state.dims) if p >= P_FLOOR else None
        branches.append(MeasurementBranch(outcome, p, post))
    return branches


def sample_outcomes(probabilities: Sequence[float], shots: int, seed: int) -> np.ndarray:
    """Multinomial shot counts from exact outcome probabilities.

    Uses numpy's PCG64 ``default_rng(seed)``, so counts are reproducible for a
    fixed seed.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    p = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    p = p / p.sum()
    return np.random.default_rng(seed).multinomial(shots, p)

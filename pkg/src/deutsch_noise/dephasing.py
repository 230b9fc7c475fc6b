"""Two representations of pure dephasing.

* Phase-damping Kraus sets, parameterized by the decoherence factor ``c``.
* Joint qubit-environment unitaries built from conditional environment
  propagators ``w0``/``w1`` (evolution of the environment given the qubit
  pointer state 0 or 1).

The factors linking them are ``c = <w1^dagger w0>`` for one process and
``<w1(2t)^dagger w0(2t)>`` for two consecutive identical processes, whose
real part is the two-process factor d^2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import UNITARY_TOL, ValidationError, as_matrix, check_dim, dagger, unitarity_error
from .states import DensityMatrix

FACTOR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ConditionalPropagators:
    """Environment propagators conditioned on the qubit pointer state."""

    w0: np.ndarray
    w1: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        w0 = as_matrix(self.w0, "w0")
        w1 = as_matrix(self.w1, "w1")
        if w0.shape != w1.shape:
            raise ValidationError("w0 and w1 must act on the same environment")
        for name, w in (("w0", w0), ("w1", w1)):
            if unitarity_error(w) > UNITARY_TOL:
                raise ValidationError(f"{name} is not unitary")
            w.setflags(write=False)
        object.__setattr__(self, "w0", w0)
        object.__setattr__(self, "w1", w1)

    @property
    def env_dim(self) -> int:
        return self.w0.shape[0]

    def doubled(self) -> "ConditionalPropagators":
        """Propagators for twice the duration (time-independent generators)."""
        return ConditionalPropagators(self.w0 @ self.w0, self.w1 @ self.w1, 2.0 * self.time)

    @classmethod
    def trivial(cls, env_dim: int = 1) -> "ConditionalPropagators":
        eye = np.eye(env_dim, dtype=np.complex128)
        return cls(eye, eye)


@dataclass(frozen=True)
class DephasingFactors:
    c: complex
    d2_factor: complex
    time: float = 0.0

    def __post_init__(self):
        if abs(self.c) > 1 + FACTOR_TOL or abs(self.d2_factor) > 1 + FACTOR_TOL:
            raise ValidationError(f"decoherence factors exceed unit modulus: {self.c}, {self.d2_factor}")

    @property
    def d2(self) -> float:
        """The real two-process factor consumed by the closed-form probabilities."""
        return float(self.d2_factor.real)


class QubitEnvironment(NamedTuple):
    """Conditional propagators for one dephasing step plus the initial environment state."""

    props: ConditionalPropagators
    state: DensityMatrix

    @property
    def factors(self) -> DephasingFactors:
        return dephasing_factors(self.props, self.state)


def phase_damping_kraus(c: float) -> list[np.ndarray]:
    """Kraus pair ``diag(1, c)`` and ``diag(0, sqrt(1 - c^2))`` for real ``c`` in [0, 1]."""
    c = float(c)
    if not 0.0 <= c <= 1.0:
        raise ValidationError(f"phase damping factor must lie in [0, 1], got {c}")
    e0 = np.array([[1.0, 0.0], [0.0, c]], dtype=np.complex128)
    e1 = np.array([[0.0, 0.0], [0.0, math.sqrt(1.0 - c * c)]], dtype=np.complex128)
    return [e0, e1]


def dephasing_kraus(c: complex) -> list[np.ndarray]:
    """Kraus set that multiplies the qubit coherence ``rho_01`` by a complex ``c``.

    Phase damping with ``|c|`` followed by the diagonal phase gate that
    supplies ``arg(c)``; reduces to :func:`phase_damping_kraus` for real
    ``c`` in [0, 1].
    """
    c = complex(c)
    mod = abs(c)
    if mod > 1 + FACTOR_TOL:
        raise ValidationError(f"|c| must not exceed 1, got {mod}")
    mod = min(mod, 1.0)
    phase = np.diag([1.0, cmath.exp(-1j * cmath.phase(c))]) if mod > 0 else np.eye(2)
    return [phase @ k for k in phase_damping_kraus(mod)]


def joint_dephasing_unitary(props_a: ConditionalPropagators, props_b: ConditionalPropagators) -> np.ndarray:
    """``sum_ij |ij><ij| (x) w_i^A (x) w_j^B`` on qubitA (x) qubitB (x) envA (x) envB."""
    da, db = props_a.env_dim, props_b.env_dim
    dim = 4 * da * db
    check_dim(dim)
    envs = da * db
    u = np.zeros((dim, dim), dtype=np.complex128)
    wa = (props_a.w0, props_a.w1)
    wb = (props_b.w0, props_b.w1)
    for i in (0, 1):
        for j in (0, 1):
            k = 2 * i + j
            u[k * envs:(k + 1) * envs, k * envs:(k + 1) * envs] = np.kron(wa[i], wb[j])
    return u


def _check_env(props: ConditionalPropagators, env_state: DensityMatrix) -> None:
    if env_state.dim != props.env_dim:
        raise ValidationError(
            f"environment state dimension {env_state.dim} does not match propagators ({props.env_dim})"
        )


def _expectation(env_state: DensityMatrix, w0: np.ndarray, w1: np.ndarray) -> complex:
    # Tr[R w1^dagger w0] without forming the product explicitly
    return complex(np.einsum("ij,kj,ki->", env_state.mat, np.conj(w1), w0))


def factor_c(props: ConditionalPropagators, env_state: DensityMatrix) -> complex:
    """Single-process decoherence factor ``Tr[R w1^dagger w0]``."""
    _check_env(props, env_state)
    return _expectation(env_state, props.w0, props.w1)


def factor_d2(props: ConditionalPropagators, env_state: DensityMatrix) -> complex:
    """Two-process factor ``Tr[R w1(2t)^dagger w0(2t)]``; d^2 is its real part."""
    _check_env(props, env_state)
    twice = props.doubled()
    return _expectation(env_state, twice.w0, twice.w1)


def dephasing_factors(props: ConditionalPropagators, env_state: DensityMatrix) -> DephasingFactors:
    return DephasingFactors(factor_c(props, env_state), factor_d2(props, env_state), props.time)

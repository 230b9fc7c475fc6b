"""One and two cycles of Deutsch's algorithm under pure dephasing.

Circuit (qubit A = factor 0, qubit B = factor 1, starting in |0>|1>)::

    cycle 1:  H(A) H(B) -> dephase -> U_f -> H(A) -> measure A
    between:  X(A) if the first outcome was 1
    cycle 2:  H(A)      -> dephase -> U_f -> H(A) -> measure A

Outcome 0 is the correct answer for constant functions and the wrong one for
balanced functions.  Four engines produce a :class:`ProbabilityTable`:

``classical``
    closed forms for phase-damping (Kraus) noise
``quantum``
    closed forms for a persistent quantum environment, in terms of c and d^2
``kraus``
    density-matrix simulation with phase-damping channels
``joint``
    density-matrix simulation of qubits plus environments
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
import numpy as np

from .dephasing import QubitEnvironment, dephasing_kraus, joint_dephasing_unitary
from .linalg import ValidationError
from .states import (
    P_FLOOR,
    DensityMatrix,
    apply_kraus,
    apply_unitary,
    measure_qubit,
)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
IDENTITY2 = np.eye(2, dtype=np.complex128)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)

SUM_TOL = 1e-12


@dataclass(frozen=True)
class FunctionId:
    """One of the four one-bit functions; n = 0, 3 constant and n = 1, 2 balanced."""

    n: int

    def __post_init__(self):
        if self.n not in (0, 1, 2, 3):
            raise ValidationError(f"function index must be 0..3, got {self.n}")

    @property
    def kind(self) -> str:
        return "constant" if self.n in (0, 3) else "balanced"

    @property
    def constant(self) -> bool:
        return self.n in (0, 3)

    @classmethod
    def of(cls, f: "FunctionId | int") -> "FunctionId":
        return f if isinstance(f, FunctionId) else cls(int(f))


ALL_FUNCTIONS = tuple(FunctionId(n) for n in range(4))


Row = tuple[float, float] | None


@dataclass(frozen=True)
class ProbabilityTable:
    """First-outcome probabilities and second-outcome probabilities conditioned on them.

    ``p_cond[i]`` is ``(p_i0, p_i1)``, or ``None`` when the first outcome ``i``
    has probability below ``P_FLOOR``.  Single-cycle tables have
    ``p_cond = None``.
    """

    p_first: tuple[float, float]
    p_cond: tuple[Row, Row] | None = None
    engine: str = ""
    function: int = -1

    @property
    def cycles(self) -> int:
        return 1 if self.p_cond is None else 2

    def cond(self, i: int, j: int) -> float | None:
        if self.p_cond is None:
            raise ValueError("single-cycle table has no conditional probabilities")
        row = self.p_cond[i]
        return None if row is None else row[j]

    @property
    def p_joint(self) -> np.ndarray:
        """``P_ij = p_i p_ij``; rows with undefined conditionals are zero."""
        out = np.zeros((2, 2))
        if self.p_cond is None:
            raise ValueError("single-cycle table has no joint probabilities")
        for i in (0, 1):
            if self.p_cond[i] is not None:
                out[i] = self.p_first[i] * np.asarray(self.p_cond[i])
        return out

    def cond_array(self) -> np.ndarray:
        """Conditional probabilities with NaN in undefined rows."""
        out = np.full((2, 2), np.nan)
        for i in (0, 1):
            if self.p_cond[i] is not None:
                out[i] = self.p_cond[i]
        return out

    def check(self, tol: float = SUM_TOL) -> None:
        """Raise ``AssertionError`` if a normalization invariant fails."""
        p0, p1 = self.p_first
        assert -tol <= p0 <= 1 + tol and -tol <= p1 <= 1 + tol, self.p_first
        assert abs(p0 + p1 - 1) <= tol, self.p_first
        if self.p_cond is None:
            return
        for i in (0, 1):
            row = self.p_cond[i]
            if row is None:
                assert self.p_first[i] < P_FLOOR, (i, self.p_first)
                continue
            assert all(-tol <= x <= 1 + tol for x in row), row
            assert abs(sum(row) - 1) <= tol, row
        total = float(self.p_joint.sum())
        assert abs(total - 1) <= tol, total


def table_distance(a: ProbabilityTable, b: ProbabilityTable) -> float:
    """Max abs difference over first-outcome, conditional and joint entries.

    Returns ``inf`` when the tables disagree on which rows are defined.
    """
    err = max(abs(x - y) for x, y in zip(a.p_first, b.p_first))
    if (a.p_cond is None) != (b.p_cond is None):
        return float("inf")
    if a.p_cond is None:
        return err
    for i in (0, 1):
        ra, rb = a.p_cond[i], b.p_cond[i]
        if (ra is None) != (rb is None):
            return float("inf")
        if ra is not None:
            err = max(err, abs(ra[0] - rb[0]), abs(ra[1] - rb[1]))
    return max(err, float(np.max(np.abs(a.p_joint - b.p_joint))))


def u_fn(f: FunctionId | int) -> np.ndarray:
    """Oracle gate ``|a>|b> -> |a>|f(a) xor b>`` as a 4x4 permutation matrix."""
    n = FunctionId.of(f).n
    if n == 0:
        return np.eye(4, dtype=np.complex128)
    if n == 1:
        return CNOT.copy()
    if n == 2:
        xa = np.kron(PAULI_X, IDENTITY2)
        return xa @ CNOT @ xa
    return np.kron(IDENTITY2, PAULI_X)


def _check_range(name: str, value: float, lo: float, hi: float) -> float:
    value = float(value)
    if not lo <= value <= hi:
        raise ValidationError(f"{name} must lie in [{lo}, {hi}], got {value}")
    return value


def single_cycle_probs_analytic(f: FunctionId | int, c_a: float, c_b: float) -> tuple[float, float]:
    f = FunctionId.of(f)
    c_a = _check_range("c_A", c_a, -1, 1)
    c_b = _check_range("c_B", c_b, -1, 1)
    p0 = (1 + c_a) / 2 if f.constant else (1 - c_a * c_b) / 2
    return p0, 1 - p0


def _assemble(f: FunctionId, p_first, p00: Callable[[], float], p11: Callable[[], float], engine: str):
    # rows whose conditioning outcome is impossible are never evaluated (0/0)
    row0 = None if p_first[0] < P_FLOOR else (p00(), 1 - p00())
    row1 = None if p_first[1] < P_FLOOR else (1 - p11(), p11())
    return ProbabilityTable(tuple(p_first), (row0, row1), engine, f.n)


def two_cycle_probs_classical(f: FunctionId | int, c_a: float, c_b: float) -> ProbabilityTable:
    """Closed-form two-cycle table for phase-damping noise.

    Phase damping needs ``c`` in [0, 1]; real ``c`` down to -1 (phase damping
    followed by a Z flip) obeys the same expressions and is accepted.
    """
    f = FunctionId.of(f)
    c_a = _check_range("c_A", c_a, -1, 1)
    c_b = _check_range("c_B", c_b, -1, 1)
    p_first = single_cycle_probs_analytic(f, c_a, c_b)
    if f.constant:
        return _assemble(f, p_first, lambda: 0.5 + c_a / 2, lambda: 0.5 - c_a / 2, "classical")
    ab = c_a * c_b
    return _assemble(
        f,
        p_first,
        lambda: 0.5 + ab * (c_a - c_b) / (2 * (1 - ab)),
        lambda: 0.5 + ab * (c_a + c_b) / (2 * (1 + ab)),
        "classical",
    )


def two_cycle_probs_quantum(
    f: FunctionId | int, c_a: float, c_b: float, d2_a: float, d2_b: float
) -> ProbabilityTable:
    """Closed-form two-cycle table for a persistent quantum environment.

    Inputs are the real decoherence factors ``c`` and two-process factors
    ``d^2``, all in [-1, 1].
    """
    f = FunctionId.of(f)
    c_a = _check_range("c_A", c_a, -1, 1)
    c_b = _check_range("c_B", c_b, -1, 1)
    d_a = _check_range("d2_A", d2_a, -1, 1)
    d_b = _check_range("d2_B", d2_b, -1, 1)
    p_first = single_cycle_probs_analytic(f, c_a, c_b)
    if f.constant:
        return _assemble(
            f,
            p_first,
            lambda: (3 + 4 * c_a + d_a) / (4 * (1 + c_a)),
            lambda: (3 - 4 * c_a + d_a) / (4 * (1 - c_a)),
            "quantum",
        )
    ab = c_a * c_b
    return _assemble(
        f,
        p_first,
        lambda: (2 - 2 * ab - c_a + c_b - c_a * d_b + d_a * c_b) / (4 * (1 - ab)),
        lambda: (2 + 2 * ab + c_a + c_b + c_a * d_b + d_a * c_b) / (4 * (1 + ab)),
        "quantum",
    )


def two_cycle_probs_exponential(f: FunctionId | int, c_a: float, c_b: float) -> ProbabilityTable:
    """Quantum closed forms specialized to exponential decay (``d^2 = c^2``)."""
    f = FunctionId.of(f)
    c_a = _check_range("c_A", c_a, 0, 1)
    c_b = _check_range("c_B", c_b, 0, 1)
    p_first = single_cycle_probs_analytic(f, c_a, c_b)
    if f.constant:
        return _assemble(f, p_first, lambda: 0.5 + (1 + c_a) / 4, lambda: 0.5 + (1 - c_a) / 4, "exponential")
    return _assemble(f, p_first, lambda: 0.5 - (c_a - c_b) / 4, lambda: 0.5 + (c_a + c_b) / 4, "exponential")


def _run_circuit(state: DensityMatrix, dephase: Callable[[DensityMatrix], DensityMatrix], f: FunctionId,
                 cycles: int, engine: str) -> ProbabilityTable:
    if cycles not in (1, 2):
        raise ValidationError("cycles must be 1 or 2")
    gate = u_fn(f)

    def finish(s):
        s = dephase(s)
        s = apply_unitary(s, gate, [0, 1])
        s = apply_unitary(s, HADAMARD, [0])
        return measure_qubit(s, 0)

    state = apply_unitary(state, np.kron(HADAMARD, HADAMARD), [0, 1])
    first = finish(state)
    p_first = (first[0].probability, first[1].probability)
    if cycles == 1:
        return ProbabilityTable(p_first, None, engine, f.n)
    rows = []
    for branch in first:
        if branch.post_state is None:
            rows.append(None)
            continue
        s = branch.post_state
        if branch.outcome == 1:
            s = apply_unitary(s, PAULI_X, [0])
        s = apply_unitary(s, HADAMARD, [0])
        second = finish(s)
        total = second[0].probability + second[1].probability
        rows.append((second[0].probability / total, second[1].probability / total))
    return ProbabilityTable(p_first, tuple(rows), engine, f.n)


def run_cycles_kraus(f: FunctionId | int, c_a: complex, c_b: complex, cycles: int = 2) -> ProbabilityTable:
    """Two-qubit density-matrix run with phase-damping channels before each U_f.

    Real ``c`` in [0, 1] gives the standard phase-damping channel.  A complex
    or negative ``c`` (``|c| <= 1``) is accepted and applied as phase damping
    with ``|c|`` followed by the phase ``arg(c)`` on the coherence.
    """
    f = FunctionId.of(f)
    ka, kb = dephasing_kraus(c_a), dephasing_kraus(c_b)
    ops = [np.kron(ea, eb) for ea in ka for eb in kb]

    def dephase(s):
        return apply_kraus(s, ops, [0, 1])

    return _run_circuit(DensityMatrix.basis([0, 1]), dephase, f, cycles, "kraus")


def run_cycles_joint(f: FunctionId | int, env_a: QubitEnvironment, env_b: QubitEnvironment,
                     cycles: int = 2) -> ProbabilityTable:
    """Density-matrix run on qubitA (x) qubitB (x) envA (x) envB.

    Each dephasing step applies the joint pure-dephasing unitary.  The
    environments are never traced out or reset, so correlations built in
    the first cycle carry into the second.
    """
    f = FunctionId.of(f)
    for env in (env_a, env_b):
        if env.state.dim != env.props.env_dim:
            raise ValidationError("environment state does not match its propagators")
    u = joint_dephasing_unitary(env_a.props, env_b.props)
    qubits = DensityMatrix.basis([0, 1])
    env_state = DensityMatrix(np.kron(env_a.state.mat, env_b.state.mat), (env_a.state.dim, env_b.state.dim))
    state = qubits.product(env_state)
    targets = list(range(len(state.dims)))

    def dephase(s):
        return apply_unitary(s, u, targets)

    return _run_circuit(state, dephase, f, cycles, "joint")


def noiseless_table(f: FunctionId | int) -> ProbabilityTable:
    """Reference table for the ideal algorithm (c = d^2 = 1)."""
    return two_cycle_probs_quantum(f, 1.0, 1.0, 1.0, 1.0)

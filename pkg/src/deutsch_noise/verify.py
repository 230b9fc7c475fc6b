"""Cross-engine and algebraic consistency checks.

Each check returns a :class:`CheckResult` with the largest deviation seen and
the tolerance it is held to.  :func:`run_all` is what ``deutsch-noise
verify`` executes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dephasing import ConditionalPropagators, QubitEnvironment, dephasing_kraus, factor_c, factor_d2
from .deutsch import (
    ALL_FUNCTIONS,
    run_cycles_joint,
    run_cycles_kraus,
    single_cycle_probs_analytic,
    table_distance,
    two_cycle_probs_classical,
    two_cycle_probs_exponential,
    two_cycle_probs_quantum,
)
from .environment import (
    NuclearSpin,
    SpinBathSpec,
    bath_environment,
    bath_factor_series,
    bath_factors,
    bath_hamiltonians,
    bath_state,
)
from .linalg import herm_expm, partial_trace
from .states import DensityMatrix, apply_kraus, apply_unitary


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<48s} max_err={self.max_error:.3e}  tol={self.tolerance:.0e}"


def phase_free_baths() -> list[tuple[str, SpinBathSpec, SpinBathSpec]]:
    """Zero-field environments (distinct for A and B) where the closed forms are exact."""

    def bath(*couplings):
        return SpinBathSpec(tuple(NuclearSpin(a) for a in couplings), 0.0)

    return [
        ("single-spin", bath((0.0, 0.0, 1.3)), bath((0.0, 0.0, 0.7))),
        ("two-spin", bath((0.0, 0.0, 1.1), (0.0, 0.0, 0.45)), bath((0.0, 0.0, 0.8), (0.0, 0.0, 0.3))),
        ("two-spin-transverse", bath((0.3, -0.2, 0.9), (0.1, 0.4, -0.5)), bath((0.5, 0.0, 0.2), (0.0, 0.0, 1.0))),
    ]


def default_times(n: int = 60, stop: float = 12.0) -> np.ndarray:
    # offset keeps grid points away from exact recurrences where an outcome becomes impossible
    return np.linspace(0.0, stop, n) + 0.0137


# floating-point engines reach exact limits only to a few ulps (1/sqrt(2) Hadamards)
MACHINE_TOL = 1e-15


def _noiseless_error(first_probs) -> float:
    worst = 0.0
    for f in ALL_FUNCTIONS:
        want = (1.0, 0.0) if f.constant else (0.0, 1.0)
        p = first_probs(f)
        worst = max(worst, abs(p[0] - want[0]), abs(p[1] - want[1]))
    return worst


def check_noiseless_analytic() -> CheckResult:
    def probs(f):
        tables = [
            single_cycle_probs_analytic(f, 1.0, 1.0),
            two_cycle_probs_classical(f, 1.0, 1.0).p_first,
            two_cycle_probs_quantum(f, 1.0, 1.0, 1.0, 1.0).p_first,
        ]
        return max(tables, key=lambda p: abs(p[0] - (1.0 if f.constant else 0.0)))

    return CheckResult("noiseless single cycle, analytic engines", _noiseless_error(probs), 0.0)


def check_noiseless_numeric() -> CheckResult:
    eye = ConditionalPropagators.trivial(2)
    env = QubitEnvironment(eye, DensityMatrix(np.eye(2) / 2, (2,)))

    def probs(f):
        tables = [run_cycles_kraus(f, 1.0, 1.0, cycles=1).p_first, run_cycles_joint(f, env, env, cycles=1).p_first]
        return max(tables, key=lambda p: abs(p[0] - (1.0 if f.constant else 0.0)))

    return CheckResult("noiseless single cycle, numeric engines", _noiseless_error(probs), MACHINE_TOL)


def check_kraus_vs_classical(points: int = 11) -> CheckResult:
    grid = np.linspace(0.0, 1.0, points)
    worst = 0.0
    for f in ALL_FUNCTIONS:
        for ca, cb in itertools.product(grid, grid):
            worst = max(worst, table_distance(run_cycles_kraus(f, ca, cb), two_cycle_probs_classical(f, ca, cb)))
    return CheckResult("kraus engine vs classical closed form", worst, 1e-12)


def check_joint_vs_quantum(times=None) -> CheckResult:
    times = default_times() if times is None else times
    worst = 0.0
    for _, bath_a, bath_b in phase_free_baths():
        for t in times:
            env_a, env_b = bath_environment(bath_a, t), bath_environment(bath_b, t)
            fa, fb = bath_factors(bath_a, t), bath_factors(bath_b, t)
            for f in ALL_FUNCTIONS:
                joint = run_cycles_joint(f, env_a, env_b)
                formula = two_cycle_probs_quantum(f, fa.c.real, fb.c.real, fa.d2, fb.d2)
                worst = max(worst, table_distance(joint, formula))
    return CheckResult("joint engine vs quantum closed form", worst, 1e-10)


def check_one_cycle_agreement(times=None) -> CheckResult:
    times = default_times() if times is None else times
    worst = 0.0
    for _, bath_a, bath_b in phase_free_baths():
        for t in times:
            env_a, env_b = bath_environment(bath_a, t), bath_environment(bath_b, t)
            ca, cb = factor_c(*env_a), factor_c(*env_b)
            for f in ALL_FUNCTIONS:
                joint = run_cycles_joint(f, env_a, env_b, cycles=1)
                kraus = run_cycles_kraus(f, ca, cb, cycles=1)
                worst = max(worst, table_distance(joint, kraus))
    return CheckResult("one cycle: joint vs kraus", worst, 1e-10)


def check_exponential_identity(points: int = 101) -> CheckResult:
    grid = np.linspace(0.0, 1.0, points)
    worst = 0.0
    for f in ALL_FUNCTIONS:
        for ca, cb in itertools.product(grid, grid):
            q = two_cycle_probs_quantum(f, ca, cb, ca * ca, cb * cb)
            worst = max(worst, table_distance(q, two_cycle_probs_exponential(f, ca, cb)))
    return CheckResult("quantum(d2=c^2) vs exponential closed form", worst, 1e-12)


def random_bath(rng: np.random.Generator, n: int, polarization: float, zeeman: float) -> SpinBathSpec:
    spins = tuple(NuclearSpin(tuple(rng.normal(scale=0.5, size=3)), polarization, k) for k in range(n))
    return SpinBathSpec(spins, zeeman)


def brute_force_factors(bath: SpinBathSpec, t: float) -> tuple[complex, complex]:
    """Factors from the full 2^n environment: exponentiate the n-spin generators directly."""
    h0, h1 = bath_hamiltonians(bath)
    props = ConditionalPropagators(herm_expm(h0, t), herm_expm(h1, t), t)
    state = bath_state(bath)
    return factor_c(props, state), factor_d2(props, state)


def check_bath_factorization(n_baths: int = 20, seed: int = 20240601) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p in (0.0, 0.1, 1.0):
        for _ in range(n_baths):
            bath = random_bath(rng, 3, p, float(rng.uniform(0, 3)))
            for t in rng.uniform(0, 10, size=3):
                c_ref, d_ref = brute_force_factors(bath, t)
                got = bath_factors(bath, t)
                worst = max(worst, abs(got.c - c_ref), abs(got.d2_factor - d_ref))
    return CheckResult("bath product law vs 8-dim brute force", worst, 1e-10)


def check_doubling_law(seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        bath = random_bath(rng, 2, float(rng.uniform(-1, 1)), float(rng.uniform(0, 3)))
        times = rng.uniform(0, 8, size=5)
        c, d = bath_factor_series(bath, times)
        c2, _ = bath_factor_series(bath, 2 * times)
        worst = max(worst, float(np.max(np.abs(d - c2))))
        for t in times[:2]:
            env = bath_environment(bath, t)
            worst = max(worst, abs(factor_d2(*env) - factor_c(*bath_environment(bath, 2 * t))))
    return CheckResult("two-process factor equals c(2t)", worst, 1e-12)


def check_single_process_equivalence(seed: int = 11) -> CheckResult:
    """Reduced qubit state after joint dephasing equals the Kraus channel with complex c."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        bath = random_bath(rng, 2, float(rng.uniform(-1, 1)), float(rng.uniform(0, 3)))
        t = float(rng.uniform(0, 6))
        props, env = bath_environment(bath, t)
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        qubit = DensityMatrix.from_ket(psi, (2,))
        joint = qubit.product(env)
        u = np.zeros((2 * props.env_dim,) * 2, dtype=complex)
        u[: props.env_dim, : props.env_dim] = props.w0
        u[props.env_dim:, props.env_dim:] = props.w1
        evolved = apply_unitary(joint, u, list(range(len(joint.dims))))
        reduced = partial_trace(evolved.mat, evolved.dims, [0])
        kraus = apply_kraus(qubit, dephasing_kraus(factor_c(props, env)), [0])
        worst = max(worst, float(np.max(np.abs(reduced - kraus.mat))))
    return CheckResult("one process: joint reduced state vs kraus", worst, 1e-12)


def check_constant_ignores_qubit_b() -> CheckResult:
    """Exact for the closed forms; machine precision for the Kraus engine."""
    worst_formula = worst_engine = 0.0
    for f in (0, 3):
        for ca in np.linspace(0, 1, 6):
            ref = two_cycle_probs_quantum(f, ca, 0.2, ca * 0.5, -0.3)
            ref_c = two_cycle_probs_classical(f, ca, 0.2)
            ref_k = run_cycles_kraus(f, ca, 0.1)
            for cb in np.linspace(-1, 1, 5):
                worst_formula = max(
                    worst_formula,
                    table_distance(ref, two_cycle_probs_quantum(f, ca, cb, ca * 0.5, 0.4 * cb)),
                    table_distance(ref_c, two_cycle_probs_classical(f, ca, cb)),
                )
            for cb in np.linspace(0, 1, 5):
                worst_engine = max(worst_engine, table_distance(ref_k, run_cycles_kraus(f, ca, cb)))
    if worst_formula > 0.0:
        return CheckResult("constant functions ignore qubit-B noise", worst_formula, 0.0)
    return CheckResult("constant functions ignore qubit-B noise", worst_engine, MACHINE_TOL)


def check_table_invariants() -> CheckResult:
    bad = 0
    tables = []
    for f in ALL_FUNCTIONS:
        for c in np.linspace(0, 1, 7):
            tables += [
                two_cycle_probs_classical(f, c, c),
                two_cycle_probs_quantum(f, c, c, c * c, c * c),
                two_cycle_probs_exponential(f, c, c),
                run_cycles_kraus(f, c, c),
            ]
    for _, bath_a, bath_b in phase_free_baths():
        for t in default_times(8):
            for f in ALL_FUNCTIONS:
                tables.append(run_cycles_joint(f, bath_environment(bath_a, t), bath_environment(bath_b, t)))
    for table in tables:
        try:
            table.check()
        except AssertionError:
            bad += 1
    return CheckResult(f"probability-table invariants ({len(tables)} tables)", float(bad), 0.0)


def run_all() -> list[CheckResult]:
    checks = [
        check_noiseless_analytic,
        check_noiseless_numeric,
        check_kraus_vs_classical,
        check_joint_vs_quantum,
        check_one_cycle_agreement,
        check_exponential_identity,
        check_bath_factorization,
        check_doubling_law,
        check_single_process_equivalence,
        check_constant_ignores_qubit_b,
        check_table_invariants,
    ]
    return [check() for check in checks]


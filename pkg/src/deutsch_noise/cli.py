"""Command-line front end.

Subcommands::

    deutsch-noise sweep-c   probabilities vs c for the closed-form engines
    deutsch-noise nv-sweep  probabilities vs time for the NV spin bath
    deutsch-noise verify    cross-engine consistency report
    deutsch-noise table     every closed form at one parameter point

Settings can come from a JSON file (``--config``); flags given on the
command line override it.  Exit codes: 0 success, 1 verification failure,
2 usage/config error, 3 data-file error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .deutsch import (
    FunctionId,
    ProbabilityTable,
    single_cycle_probs_analytic,
    two_cycle_probs_classical,
    two_cycle_probs_exponential,
    two_cycle_probs_quantum,
)
from .environment import (
    BathTableError,
    bath_factor_series,
    bundled_table_text,
    load_bath_file,
    load_bath_table,
    zeeman_frequency,
)
from .linalg import ValidationError
from .states import sample_outcomes

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3
UNDEF = "undef"

SWEEP_ENGINES = ("classical", "quantum-exponential")
NV_ENGINES = ("classical-from-bath", "quantum-from-bath", "exponential-from-bath")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    functions: list[int] = field(default_factory=lambda: [0, 1, 2, 3])
    engines: list[str] = field(default_factory=list)
    start: float = 0.0
    stop: float = 1.0
    count: int = 101
    bath_a: str | None = None
    bath_b: str | None = None
    magnetic_field_T: float = 0.1
    polarization: float = 0.1
    angular_zeeman: bool = True
    polarization_convention: str = "spin"
    output: str | None = None
    shots: int | None = None
    seed: int | None = None
    jobs: int = 1

    def validate(self) -> None:
        if self.count < 2:
            raise ConfigError("count: grid needs at least 2 points")
        if not self.start < self.stop:
            raise ConfigError("start: must be smaller than stop")
        if self.shots is not None:
            if self.shots <= 0:
                raise ConfigError("shots: must be positive")
            if self.seed is None:
                raise ConfigError("seed: required when shots is set")
        bad = [f for f in self.functions if f not in (0, 1, 2, 3)]
        if bad:
            raise ConfigError(f"functions: unknown function ids {bad}")
        if self.jobs < 1:
            raise ConfigError("jobs: must be at least 1")


def fmt(x: float | None) -> str:
    return UNDEF if x is None else f"{x:.15g}"


def _parse_functions(value) -> list[int]:
    if isinstance(value, list):
        items = value
    else:
        items = str(value).split(",")
    out = []
    for item in items:
        item = str(item).strip()
        if item == "constant":
            out += [0, 3]
        elif item == "balanced":
            out += [1, 2]
        elif item == "all":
            out += [0, 1, 2, 3]
        else:
            try:
                out.append(int(item))
            except ValueError:
                raise ConfigError(f"functions: cannot parse {item!r}") from None
    return sorted(set(out))


def _parse_engines(value, allowed) -> list[str]:
    items = value if isinstance(value, list) else str(value).split(",")
    items = [str(e).strip() for e in items]
    if items == ["all"]:
        return list(allowed)
    bad = [e for e in items if e not in allowed]
    if bad:
        raise ConfigError(f"engine: unknown engine(s) {bad}; choose from {', '.join(allowed)}")
    return items


_DEFAULT_GRID = {"sweep-c": (0.0, 1.0, 101), "nv-sweep": (0.0, 20.0, 201)}


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge JSON config file values with flags (flags win)."""
    file_values = {}
    if getattr(args, "config", None):
        try:
            file_values = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON in {args.config}: {exc}") from None
        if not isinstance(file_values, dict):
            raise ConfigError("config: top level must be an object")

    def pick(key, default):
        flag = getattr(args, key, None)
        if flag is not None:
            return flag
        return file_values.get(key, default)

    start, stop, count = _DEFAULT_GRID.get(args.command, (0.0, 1.0, 101))
    allowed = SWEEP_ENGINES if args.command == "sweep-c" else NV_ENGINES
    try:
        cfg = RunConfig(
            subcommand=args.command,
            functions=_parse_functions(pick("functions", "all")),
            engines=_parse_engines(pick("engine", "all"), allowed),
            start=float(pick("start", start)),
            stop=float(pick("stop", stop)),
            count=int(pick("count", count)),
            bath_a=pick("bath_a", None),
            bath_b=pick("bath_b", None),
            magnetic_field_T=float(pick("magnetic_field_T", 0.1)),
            polarization=float(pick("polarization", 0.1)),
            angular_zeeman=bool(pick("angular_zeeman", True)),
            polarization_convention=str(pick("polarization_convention", "spin")),
            output=pick("output", None),
            shots=pick("shots", None),
            seed=pick("seed", None),
            jobs=int(pick("jobs", 1)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config: {exc}") from None
    cfg.validate()
    return cfg


def _table_fields(table: ProbabilityTable) -> list[str]:
    joint = table.p_joint
    cond = [table.cond(i, j) for i in (0, 1) for j in (0, 1)]
    return [fmt(table.p_first[0]), fmt(table.p_first[1])] + [fmt(x) for x in cond] + [
        fmt(joint[i, j]) for i in (0, 1) for j in (0, 1)
    ]


TABLE_COLUMNS = ["p0", "p1", "p00", "p01", "p10", "p11", "P00", "P01", "P10", "P11"]
COUNT_COLUMNS = ["N00", "N01", "N10", "N11"]


def _map(fn, items, jobs: int):
    # executor.map keeps grid order regardless of completion order
    if jobs == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _counts(rng_seed: int, row_index: int, table: ProbabilityTable, shots: int) -> list[str]:
    seed = np.random.SeedSequence([rng_seed, row_index]).generate_state(1)[0]
    return [str(int(n)) for n in sample_outcomes(table.p_joint.ravel(), shots, int(seed))]


def sweep_c(cfg: RunConfig) -> list[list[str]]:
    """Rows for c_A = c_B = c on the configured grid."""
    grid = np.linspace(cfg.start, cfg.stop, cfg.count)
    if grid[0] < 0 or grid[-1] > 1:
        raise ConfigError("start/stop: c grid must lie in [0, 1]")
    header = ["engine", "function", "kind", "c"] + TABLE_COLUMNS
    if cfg.shots:
        header += COUNT_COLUMNS
    jobs = [(e, f, c) for e in cfg.engines for f in cfg.functions for c in grid]

    def evaluate(job):
        engine, f, c = job
        if engine == "classical":
            return two_cycle_probs_classical(f, c, c)
        return two_cycle_probs_exponential(f, c, c)

    tables = _map(evaluate, jobs, cfg.jobs)
    rows = [header]
    for k, ((engine, f, c), table) in enumerate(zip(jobs, tables)):
        row = [engine, str(f), FunctionId(f).kind, fmt(c)] + _table_fields(table)
        if cfg.shots:
            row += _counts(cfg.seed, k, table, cfg.shots)
        rows.append(row)
    return rows


def _load_baths(cfg: RunConfig):
    zeeman = zeeman_frequency(cfg.magnetic_field_T, angular=cfg.angular_zeeman)
    kwargs = dict(polarization=cfg.polarization, zeeman=zeeman, polarization_convention=cfg.polarization_convention)
    bath_a = load_bath_file(cfg.bath_a, **kwargs) if cfg.bath_a else load_bath_table(bundled_table_text(), **kwargs)
    bath_b = load_bath_file(cfg.bath_b, **kwargs) if cfg.bath_b else bath_a
    return bath_a, bath_b


def nv_sweep(cfg: RunConfig) -> list[list[str]]:
    """Rows per time point: raw factors of qubit A and B, then each engine's table.

    The closed forms take real inputs, so Re(c) and Re(d2 factor) are used.
    """
    if cfg.start < 0:
        raise ConfigError("start: times must be non-negative")
    bath_a, bath_b = _load_baths(cfg)
    times = np.linspace(cfg.start, cfg.stop, cfg.count)
    ca, da = bath_factor_series(bath_a, times)
    cb, db = (ca, da) if bath_b is bath_a else bath_factor_series(bath_b, times)
    header = ["engine", "function", "kind", "t_us", "cA_re", "cA_im", "cA_abs", "d2A_re", "d2A_im",
              "cB_re", "cB_im", "d2B_re", "d2B_im"] + TABLE_COLUMNS
    if cfg.shots:
        header += COUNT_COLUMNS
    jobs = [(e, f, k) for e in cfg.engines for f in cfg.functions for k in range(len(times))]

    def clip(x):
        return min(1.0, max(-1.0, float(x)))

    def evaluate(job):
        engine, f, k = job
        a, b = clip(ca[k].real), clip(cb[k].real)
        if engine == "classical-from-bath":
            return two_cycle_probs_classical(f, a, b)
        if engine == "quantum-from-bath":
            return two_cycle_probs_quantum(f, a, b, clip(da[k].real), clip(db[k].real))
        return two_cycle_probs_quantum(f, a, b, a * a, b * b)

    tables = _map(evaluate, jobs, cfg.jobs)
    rows = [header]
    for n, ((engine, f, k), table) in enumerate(zip(jobs, tables)):
        row = [engine, str(f), FunctionId(f).kind, fmt(times[k]),
               fmt(ca[k].real), fmt(ca[k].imag), fmt(abs(ca[k])), fmt(da[k].real), fmt(da[k].imag),
               fmt(cb[k].real), fmt(cb[k].imag), fmt(db[k].real), fmt(db[k].imag)] + _table_fields(table)
        if cfg.shots:
            row += _counts(cfg.seed, n, table, cfg.shots)
        rows.append(row)
    return rows


def table_point(f: int, c_a: float, c_b: float, d2_a: float | None, d2_b: float | None) -> list[list[str]]:
    d2_a = c_a * c_a if d2_a is None else d2_a
    d2_b = c_b * c_b if d2_b is None else d2_b
    rows = [["formula", "function", "kind"] + TABLE_COLUMNS]
    kind = FunctionId(f).kind
    p0, p1 = single_cycle_probs_analytic(f, c_a, c_b)
    rows.append(["single-cycle", str(f), kind, fmt(p0), fmt(p1)] + [""] * 8)
    tables = [("classical", two_cycle_probs_classical(f, c_a, c_b)),
              ("quantum", two_cycle_probs_quantum(f, c_a, c_b, d2_a, d2_b))]
    if 0 <= c_a <= 1 and 0 <= c_b <= 1:
        tables.append(("exponential", two_cycle_probs_exponential(f, c_a, c_b)))
    for name, table in tables:
        rows.append([name, str(f), kind] + _table_fields(table))
    return rows


def write_rows(rows: list[list[str]], output: str | None) -> None:
    if output:
        with open(output, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    else:
        csv.writer(sys.stdout, lineterminator="\n").writerows(rows)


def _add_common(p: argparse.ArgumentParser, grid_label: str) -> None:
    p.add_argument("--config", help="JSON file with settings; flags override it")
    p.add_argument("--functions", help="comma list of 0-3, 'constant', 'balanced' or 'all'")
    p.add_argument("--engine", help="comma list of engines or 'all'")
    p.add_argument("--start", type=float, help=f"first {grid_label} grid value")
    p.add_argument("--stop", type=float, help=f"last {grid_label} grid value")
    p.add_argument("--count", type=int, help="number of grid points")
    p.add_argument("--output", "-o", help="CSV path (default stdout)")
    p.add_argument("--shots", type=int, help="also emit sampled counts N_ij")
    p.add_argument("--seed", type=int, help="PRNG seed, required with --shots")
    p.add_argument("--jobs", type=int, help="worker threads for grid evaluation")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deutsch-noise", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-c", help="probability tables vs decoherence factor c")
    _add_common(p, "c")

    p = sub.add_parser("nv-sweep", help="probability tables vs time for the NV spin bath")
    _add_common(p, "time (us)")
    p.add_argument("--bath-a", dest="bath_a", help="coupling table for qubit A (default: bundled 32-spin table)")
    p.add_argument("--bath-b", dest="bath_b", help="coupling table for qubit B (default: same as A)")
    p.add_argument("--magnetic-field-T", dest="magnetic_field_T", type=float)
    p.add_argument("--polarization", type=float)
    p.add_argument("--angular-zeeman", dest="angular_zeeman", action=argparse.BooleanOptionalAction, default=None,
                   help="use 2*pi*gamma_n*B (default) or gamma_n*B as the Larmor frequency")
    p.add_argument("--polarization-convention", dest="polarization_convention", choices=("spin", "pauli"))

    sub.add_parser("verify", help="run the cross-engine consistency suite")

    p = sub.add_parser("table", help="closed-form probabilities at one parameter point")
    p.add_argument("--function", "-f", type=int, required=True, choices=range(4))
    p.add_argument("--c-a", dest="c_a", type=float, required=True)
    p.add_argument("--c-b", dest="c_b", type=float, required=True)
    p.add_argument("--d2-a", dest="d2_a", type=float, help="default c_a^2")
    p.add_argument("--d2-b", dest="d2_b", type=float, help="default c_b^2")
    p.add_argument("--output", "-o")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            results = verify_mod.run_all()
            for r in results:
                print(r.line())
            ok = all(r.passed for r in results)
            print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
            return EXIT_OK if ok else EXIT_VERIFY
        if args.command == "table":
            write_rows(table_point(args.function, args.c_a, args.c_b, args.d2_a, args.d2_b), args.output)
            return EXIT_OK
        cfg = build_config(args)
        rows = sweep_c(cfg) if cfg.subcommand == "sweep-c" else nv_sweep(cfg)
        write_rows(rows, cfg.output)
        return EXIT_OK
    except BathTableError as exc:
        print(f"deutsch-noise: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, ValidationError) as exc:
        print(f"deutsch-noise: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``labs <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 verification failure,
3 enumeration budget or memory cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .exact import BudgetExceeded, exhaustive_optimum
from .experiment import SOLVERS, SolverSpec, run_experiment, run_trial, summarize_groups
from .legendre import default_grid, grid_csv, grid_points
from .records import STATUS_OK, read_jsonl, write_jsonl
from .registry import BestKnownRegistry, emit_merit_table, table_subset, verify_registry
from .saw import DEFAULT_MEMORY_CAP
from .stats import AsymptoticModel, fit_exponential_model, predict

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_BUDGET = 0, 1, 2, 3
_HOUR = 3600.0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _omega(text: str) -> int | None:
    if text.lower() in ("u", "unlimited"):
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("omega-c must be >= 1 or 'U'")
    return value


def _range(text: str) -> tuple[float, float]:
    lo, hi = (float(x) for x in text.split(","))
    return lo, hi


def _target(args, registry_path) -> int:
    if args.target is not None:
        return args.target
    reg = BestKnownRegistry.load(registry_path)
    return reg.target(args.L, skew=not args.full)


def _spec(args) -> SolverSpec:
    return SolverSpec(
        solver=args.solver,
        L=args.L,
        target=_target(args, args.registry),
        time_limit=args.time_limit,
        omega_c=args.omega_c,
        skew=not args.full,
        probe_limit=args.probe_limit,
        memory_cap=args.memory_cap,
    )


def cmd_solve(args) -> int:
    rec = run_trial(_spec(args), args.seed)
    if args.out:
        write_jsonl([rec], args.out, append=True)
    print(rec.to_json())
    return EXIT_OK if rec.status == STATUS_OK else EXIT_BUDGET


def cmd_experiment(args) -> int:
    records = run_experiment(_spec(args), args.n, seed_base=args.seed, workers=args.workers,
                             out=args.out, adopt_improved=args.adopt_improved)
    for s in summarize_groups(records):
        print(json.dumps(s.to_dict()))
    return EXIT_OK if all(r.status == STATUS_OK for r in records) else EXIT_BUDGET


def cmd_summarize(args) -> int:
    records = [r for path in args.files for r in read_jsonl(path)]
    if not records:
        print("no records", file=sys.stderr)
        return EXIT_USAGE
    for s in summarize_groups(records):
        print(json.dumps(s.to_dict()))
    return EXIT_OK


def cmd_fit(args) -> int:
    records = [r for path in args.files for r in read_jsonl(path)]
    by_solver: dict[str, list[tuple[int, float]]] = {}
    for s in summarize_groups(records):
        value = s.mean_probes if args.metric == "probes" else s.mean_runtime_ms
        if value is None:
            continue
        if args.metric == "seconds":
            value /= 1000.0
        by_solver.setdefault(s.solver, []).append((s.L, value))
    if not by_solver:
        print("no uncensored records to fit", file=sys.stderr)
        return EXIT_USAGE
    for solver, points in sorted(by_solver.items()):
        model = fit_exponential_model(points, unit=args.metric)
        print(json.dumps({"solver": solver, "a": model.a, "b": model.b, "unit": model.unit,
                          "points": len(points)}))
    return EXIT_OK


def cmd_predict(args) -> int:
    scale = _HOUR if args.hours else 1.0
    model = AsymptoticModel(args.a, args.b, unit="seconds")
    rep = predict(model, args.L, args.time_limit * scale, args.load_factor, args.n, args.n_c,
                  args.p_serial)
    data = rep.to_dict()
    print(json.dumps(data))
    unit = "h" if args.hours else "s"
    rows = [
        ("model mean", f"{rep.mean / scale:.6g} {unit}"),
        ("hit ratio", f"{rep.hit_ratio:.7f}"),
        (f"hits of {rep.n_trials}", str(rep.hits)),
        (f"processors for {rep.n_c} hits", str(rep.processors_needed)),
        ("single-run solvability", f"{rep.solvability_single / scale:.6g} {unit}"),
        (f"serial solvability (p={args.p_serial})", f"{rep.solvability_serial / scale:.6g} {unit}"),
    ]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    try:
        res = exhaustive_optimum(args.L, skew_only=not args.full, max_free=args.max_free)
    except BudgetExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BUDGET
    print(json.dumps({"L": res.L, "skewOnly": res.skew_only, "energy": res.energy,
                      "merit": res.merit_factor, "skewCount": res.skew_count,
                      "nonSkewCount": res.nonskew_count, "solutions": list(res.solutions)}))
    return EXIT_OK


def cmd_legendre(args) -> int:
    dr, dt = default_grid(args.p)
    pts = grid_points(args.p, args.r_range or dr, args.t_range or dt)
    if not args.all:
        pts = [max(pts, key=lambda g: (g.merit, -g.r, -g.t))]
    sys.stdout.write(grid_csv(pts))
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify_registry(args.registry)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_merit_table(args) -> int:
    reg = BestKnownRegistry.load(args.registry)
    if args.solutions_only:
        reg = table_subset(reg)
    text = emit_merit_table(reg)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--L", type=int, required=True, help="sequence length")
    p.add_argument("--solver", choices=SOLVERS, default="saw")
    p.add_argument("--omega-c", type=_omega, default=8, help="walk segment coefficient, or U for unlimited")
    p.add_argument("--target", type=int, help="target energy (default: registry best-known)")
    p.add_argument("--time-limit", type=float, default=math.inf, help="seconds per trial")
    p.add_argument("--probe-limit", type=int, help="probe budget per trial")
    p.add_argument("--memory-cap", type=int, default=DEFAULT_MEMORY_CAP,
                   help="visited-set byte cap for unlimited walks")
    p.add_argument("--seed", type=int, default=0, help="seed (base seed for experiments)")
    p.add_argument("--full", action="store_true", help="search full-length coordinates (tabu solvers)")
    p.add_argument("--registry", help="registry TSV (default: packaged)")
    p.add_argument("--out", help="append JSONL records to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="labs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="run one trial")
    _solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="run N seeded trials")
    _solver_flags(p)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--adopt-improved", action="store_true",
                   help="use an improved value as the target of later trials")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("summarize", help="summarize JSONL records")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("fit", help="fit a*b^L to per-L means of JSONL records")
    p.add_argument("files", nargs="+")
    p.add_argument("--metric", choices=("probes", "seconds"), default="probes")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="hit ratio, processor count and solvability from a model")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--time-limit", type=float, required=True)
    p.add_argument("--load-factor", type=float, default=1.0)
    p.add_argument("--n", type=int, default=100, help="number of trials")
    p.add_argument("--n-c", type=int, default=100, help="hits wanted")
    p.add_argument("--p-serial", type=float, default=0.99)
    p.add_argument("--hours", action="store_true", help="time limit and output in hours")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("oracle", help="exhaustive optimum for small L")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--full", action="store_true", help="scan all coordinates, not only skew ones")
    p.add_argument("--max-free", type=int, help="override the enumeration budget (free bits)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("legendre", help="rotated/appended Legendre sequence grid search")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r-range", type=_range)
    p.add_argument("--t-range", type=_range)
    p.add_argument("--all", action="store_true", help="emit every grid point, not only the best")
    p.set_defaults(func=cmd_legendre)

    p = sub.add_parser("verify", help="re-evaluate every registry solution")
    p.add_argument("--registry")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("merit-table", help="CSV of L, E, F, 1/L")
    p.add_argument("--registry")
    p.add_argument("--solutions-only", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_merit_table)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"labs {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

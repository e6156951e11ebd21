"""
Command-line front end.

Exit codes: 0 success, 2 usage or input error, 3 domain error (degenerate
design, no known limit law).
"""

import argparse
import csv
import io
import sys

import numpy as np

from .asymptotics import ModelSpec, population_loss, sandwich_parts
from .estimators import (
    Dataset,
    DegenerateDesignError,
    EstimatorKind,
    SearchOptions,
    profile_fit,
)
from .simulation import ReplicationPlan, default_threads, generate, loss_curve, run_monte_carlo

EXIT_USAGE = 2
EXIT_DOMAIN = 3


class InputError(Exception):
    pass


class DomainError(Exception):
    pass


def _fmt(x) -> str:
    return repr(float(x))


def read_dataset(path: str) -> Dataset:
    """Parse a CSV with header ``x1,...,xd,y``."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    if not rows:
        raise InputError(f"{path}:1: empty file")
    header = [h.strip() for h in rows[0]]
    d = len(header) - 1
    if d < 1 or header != [f"x{j}" for j in range(1, d + 1)] + ["y"]:
        raise InputError(f"{path}:1: header must be x1,...,xd,y")
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != d + 1:
            raise InputError(f"{path}:{lineno}: expected {d + 1} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise InputError(f"{path}:{lineno}: not a number") from None
        if not all(np.isfinite(vals)):
            raise InputError(f"{path}:{lineno}: nonfinite value")
        values.append(vals)
    if not values:
        raise InputError(f"{path}: no observations")
    arr = np.array(values)
    try:
        return Dataset(arr[:, :d], arr[:, d])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def write_dataset(data: Dataset, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([f"x{j}" for j in range(1, data.d + 1)] + ["y"])
    for x, y in zip(data.X, data.Y):
        w.writerow([_fmt(v) for v in x] + [_fmt(y)])


def _write_rows(args, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _emit(args, buf.getvalue())


def _emit(args, text: str) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"{args.output}: {exc.strerror or exc}") from None


def _options(args) -> SearchOptions:
    return SearchOptions(
        tol=args.tol,
        bracket=args.bracket,
        grid=args.grid,
        bandwidth_const=args.bandwidth_const,
        mu_const=args.mu_const,
    )


# ---------------------------------------------------------------- commands


def cmd_fit(args) -> int:
    data = read_dataset(args.input)
    if args.decreasing:
        data = Dataset(data.X, -data.Y)
    try:
        res = profile_fit(args.estimator, data, _options(args))
    except DegenerateDesignError as exc:
        raise DomainError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    header = [f"alpha{j}" for j in range(1, data.d + 1)] + ["loss", "evaluations"]
    _write_rows(args, header, [[_fmt(a) for a in res.alpha_hat] + [_fmt(res.loss), res.evaluations]])
    return 0


def cmd_simulate(args) -> int:
    if args.reps < 2:
        raise InputError("need reps >= 2 for covariance")
    try:
        plan = ReplicationPlan(ModelSpec(args.model), EstimatorKind(args.estimator), args.n, args.reps, args.seed)
        s = run_monte_carlo(plan, _options(args), threads=args.threads)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    row = s.row()
    keys = ["mu1", "mu2", "s11", "s22", "s12", "reps_used", "failures"]
    _write_rows(args, keys, [[_fmt(row[k]) if k[0] in "ms" else row[k] for k in keys]])
    return 0


def cmd_losscurve(args) -> int:
    if args.grid_min > args.grid_max:
        raise InputError("grid-min exceeds grid-max")
    if not (0.0 <= args.grid_min and args.grid_max <= 1.0):
        raise InputError("grid must lie in [0, 1]")
    if args.grid_points < 1:
        raise InputError("need grid-points >= 1")
    if args.population and args.estimator not in ("lse", "sse"):
        raise InputError("population curves exist for lse and sse only")
    grid = np.linspace(args.grid_min, args.grid_max, args.grid_points)
    data = generate(ModelSpec(args.model), args.n, args.seed)
    curve = loss_curve(data, EstimatorKind(args.estimator), grid, _options(args))
    header = ["alpha1", "loss"]
    rows = [[_fmt(a), _fmt(v)] for a, v in curve]
    if args.population:
        header.append("population")
        pop = population_loss(args.estimator, ModelSpec(args.model), grid)
        for r, (_, v) in zip(rows, pop):
            r.append(_fmt(v))
    _write_rows(args, header, rows)
    return 0


def cmd_asymptotics(args) -> int:
    try:
        bread, meat, sandwich = sandwich_parts(args.estimator, ModelSpec(args.model))
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    rows = []
    for name, M in (("bread", bread), ("meat", meat), ("sandwich", sandwich)):
        for i, r in enumerate(M, start=1):
            rows.append([name, i] + [_fmt(v) for v in r])
    _write_rows(args, ["matrix", "row"] + [f"c{j}" for j in range(1, bread.shape[1] + 1)], rows)
    return 0


def cmd_generate(args) -> int:
    buf = io.StringIO()
    write_dataset(generate(ModelSpec(args.model), args.n, args.seed), buf)
    _emit(args, buf.getvalue())
    return 0


# ---------------------------------------------------------------- parser


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _add_search(p) -> None:
    p.add_argument("--tol", type=float, default=1e-6, help="golden-section tolerance in radians")
    p.add_argument("--bracket", type=float, default=0.3, help="half-width of the local search bracket")
    p.add_argument("--grid", type=_positive_int, default=64, help="starting grid size for the LSE search")
    p.add_argument("--bandwidth-const", type=float, default=0.5)
    p.add_argument("--mu-const", type=float, default=0.1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monoindex", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    kinds = [k.value for k in EstimatorKind]
    models = [m.value for m in ModelSpec]

    p = sub.add_parser("fit", help="estimate the index direction from a CSV dataset")
    p.add_argument("input")
    p.add_argument("--estimator", choices=kinds, default="sse")
    p.add_argument("--decreasing", action="store_true", help="fit a nonincreasing link by negating y")
    p.add_argument("--output", "-o")
    _add_search(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="Monte Carlo study for one model and estimator")
    p.add_argument("--model", choices=models, default="1")
    p.add_argument("--estimator", choices=kinds, default="sse")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=_positive_int, default=None, help="worker processes (MONOINDEX_THREADS)")
    p.add_argument("--output", "-o")
    _add_search(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("losscurve", help="criterion along alpha = (a1, sqrt(1 - a1^2))")
    p.add_argument("--model", choices=models, default="1")
    p.add_argument("--n", type=_positive_int, default=10000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--estimator", choices=kinds, default="sse")
    p.add_argument("--grid-min", type=float, default=0.0)
    p.add_argument("--grid-max", type=float, default=1.0)
    p.add_argument("--grid-points", type=int, default=101)
    p.add_argument("--population", action="store_true", help="add the quadrature population curve")
    p.add_argument("--output", "-o")
    _add_search(p)
    p.set_defaults(func=cmd_losscurve)

    p = sub.add_parser("asymptotics", help="limit covariance matrices")
    p.add_argument("--model", choices=models, default="1")
    p.add_argument("--estimator", choices=kinds, default="sse")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("generate", help="write a simulated dataset as CSV")
    p.add_argument("--model", choices=models, default="1")
    p.add_argument("--n", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 0) is None:
        args.threads = default_threads()
    try:
        return args.func(args)
    except InputError as exc:
        print(f"monoindex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"monoindex: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())

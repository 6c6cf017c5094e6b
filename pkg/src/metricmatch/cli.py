"""Command line entry point: ``metricmatch <subcommand> ...``.

Every experiment writes CSV (header row, ``.`` decimals) to ``--output`` or
stdout. Exit codes: 0 success, 1 bad input or failed validation, 3 a hard
invariant broke mid-run.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import experiments as ex
from . import io
from .generators import FAMILIES, GenerationError, generate
from .matching import MatchingStats, expected_matching_sum
from .maxsquare import Infeasible, MaxSquareSumInstance
from .metrics import MetricError, reference, validate_metric


def _add_instance(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("instance (a file, or a generated family)")
    g.add_argument("--input", type=Path, help="instance file (.matrix, .points or .graph)")
    g.add_argument("--format", choices=io.FORMATS, help="override the format implied by the suffix")
    g.add_argument("--family", choices=FAMILIES, help="generate an instance instead of reading one")
    g.add_argument("--n", type=int, help="number of points")
    g.add_argument("--dim", type=int, default=2, help="euclidean dimension (default 2)")
    g.add_argument("--p", type=float, help="G(n,p) edge probability (default 2 ln n / n)")
    g.add_argument("--norm", default="2", choices=("1", "2", "inf"), help="euclidean norm")
    g.add_argument("--instance-seed", type=int, help="seed for the generated instance (default --seed)")


def _add_run(p: argparse.ArgumentParser, epsilon: Optional[float] = None) -> None:
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="base seed; trial i uses seed+i")
    p.add_argument("--output", type=Path, help="CSV path (default stdout)")
    p.add_argument("--parallel", type=int, default=1, help="worker processes")
    if epsilon is not None:
        p.add_argument("--epsilon", type=float, default=epsilon)


def _norm(s: str):
    return float("inf") if s == "inf" else int(s)


def _instance(args):
    if args.input is not None:
        return io.load(args.input, args.format, norm=_norm(args.norm))
    if args.family is None or args.n is None:
        raise SystemExit("error: give --input, or --family with --n")
    seed = args.seed if args.instance_seed is None else args.instance_seed
    return generate(args.family, args.n, seed, dim=args.dim, p=args.p, norm=_norm(args.norm))


def _write(rows, header, path: Optional[Path]) -> None:
    out = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if path:
            out.close()


def _check_epsilon(eps: float, allow_one: bool = False) -> None:
    if not (0 < eps <= 1 if allow_one else 0 < eps < 1):
        raise SystemExit(f"error: --epsilon must lie in (0, 1{']' if allow_one else ')'}")


def cmd_gen(args) -> int:
    if args.family is None or args.n is None:
        raise SystemExit("error: gen needs --family and --n")
    inst = generate(args.family, args.n, args.seed, dim=args.dim, p=args.p, norm=_norm(args.norm))
    fmt = io.suffix_for(inst)
    if args.output is None:
        io.dump(inst, sys.stdout)
        return 0
    path = args.output
    if path.suffix.lstrip(".") not in io.FORMATS:
        path = path.with_name(path.name + "." + fmt)
    with open(path, "w") as fh:
        io.dump(inst, fh)
    print(path, file=sys.stderr)
    return 0


def cmd_stats(args) -> int:
    inst = _instance(args)
    ref = reference(inst)
    rows = ex.stats_rows(inst, args.trials, args.seed, args.parallel, ref=ref)
    _write(rows, ex.STATS_HEADER, args.output)
    if len(rows) >= 2:
        st = MatchingStats.from_values([r[2] for r in rows])
        print(
            f"n={inst.n} r_bar={ref.r_bar:.6g} mean={st.mean:.6g} (expected "
            f"{expected_matching_sum(inst.n, ref.r_bar):.6g}, se {st.std_error:.3g}) "
            f"variance={st.variance:.6g} cap n*r_bar={inst.n * ref.r_bar:.6g}",
            file=sys.stderr,
        )
    return 0


def cmd_median(args) -> int:
    _check_epsilon(args.epsilon, allow_one=True)
    inst = _instance(args)
    rows = ex.median_rows(inst, args.epsilon, args.trials, args.seed, args.parallel)
    _write(rows, ex.MEDIAN_HEADER, args.output)
    return 0


def cmd_avgdist(args) -> int:
    inst = _instance(args)
    if args.method == "pair_sampling":
        param = args.t
    else:
        param = args.epsilon
        if args.method == "matching_max" and param <= 0:
            raise SystemExit("error: --epsilon must be positive")
    rows = ex.avgdist_rows(inst, args.method, param, args.trials, args.seed, args.parallel)
    _write(rows, ex.AVGDIST_HEADER, args.output)
    return 0


def cmd_maxsq(args) -> int:
    fixed = None
    if args.r_bar is not None or args.cap is not None:
        if args.r_bar is None or args.cap is None or args.n is None:
            raise SystemExit("error: a fixed instance needs --n, --r-bar and --cap")
        fixed = MaxSquareSumInstance(args.n, args.r_bar, args.cap)
    rows = ex.maxsq_rows(args.trials, args.seed, n_max=args.n or 64, fixed=fixed)
    _write(rows, ex.MAXSQ_HEADER, args.output)
    return 0


def cmd_adversary(args) -> int:
    _check_epsilon(args.epsilon)
    rows = ex.adversary_rows(args.algorithm, args.n, args.epsilon, args.trials, args.seed,
                             k=args.k, parallel=args.parallel)
    _write(rows, ex.ADVERSARY_HEADER, args.output)
    return 0


def _raw_matrix(path: Path) -> np.ndarray:
    rows = [ln.split() for ln in path.read_text().splitlines() if ln.strip()]
    n = int(rows[0][0])
    m = np.array([[float(t) for t in r] for r in rows[1 : n + 1]])
    if m.shape != (n, n):
        raise io.ParseError(f"expected a {n}x{n} matrix, got {m.shape}")
    return m


def cmd_validate(args) -> int:
    if args.input is None:
        inst = _instance(args)
        m, exact = inst.to_matrix(), inst.exact
    elif (args.format or args.input.suffix.lstrip(".")) == "matrix":
        m, exact = _raw_matrix(args.input), False
    else:
        inst = io.load(args.input, args.format, norm=_norm(args.norm))
        m, exact = inst.to_matrix(), inst.exact
    v = validate_metric(m, rel_tol=0.0 if exact else 1e-9)
    if v is None:
        print(f"ok n={m.shape[0]}")
        return 0
    print(f"violation kind={v.kind} witness={','.join(map(str, v.witness))}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metricmatch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a seeded instance file")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--p", type=float)
    p.add_argument("--norm", default="2", choices=("1", "2", "inf"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("stats", help="matching-sum trials")
    _add_instance(p)
    _add_run(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("median", help="Las Vegas 1-median runs")
    _add_instance(p)
    _add_run(p, epsilon=0.5)
    p.set_defaults(func=cmd_median)

    p = sub.add_parser("avgdist", help="average-distance estimator runs")
    _add_instance(p)
    _add_run(p, epsilon=0.25)
    p.add_argument("--method", choices=("matching_max", "graph_single_matching", "pair_sampling"),
                   default="matching_max")
    p.add_argument("--t", type=int, default=1000, help="pair samples for pair_sampling")
    p.set_defaults(func=cmd_avgdist)

    p = sub.add_parser("maxsq", help="max square sum: greedy vs analytic bound")
    p.add_argument("--n", type=int, help="fixed n, or the largest n for random instances")
    p.add_argument("--r-bar", type=float)
    p.add_argument("--cap", type=float)
    _add_run(p)
    p.set_defaults(func=cmd_maxsq)

    p = sub.add_parser("adversary", help="fooling-metric construction against stub algorithms")
    p.add_argument("--algorithm", choices=("query-nothing", "random-k", "truncated-las-vegas", "brute-force"),
                   default="query-nothing")
    p.add_argument("--k", type=int, help="query count for random-k, query cap for truncated-las-vegas")
    p.add_argument("--n", type=int, default=100)
    _add_run(p, epsilon=0.5)
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("validate", help="check the metric axioms")
    _add_instance(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ex.InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 3
    except (io.ParseError, MetricError, GenerationError, Infeasible, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Seeded trial drivers behind the CLI.

Each driver returns a header and one row per trial. Trial ``i`` runs with
seed ``base_seed + i`` on its own oracle, so rows are reproducible one at a
time and independent of ``parallel``. Hard invariants are checked as rows
are produced and raise :class:`InvariantViolation`.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Callable, Optional, Sequence

import numpy as np

from . import adversary as adv
from .avgdist import estimate_avg_general, estimate_avg_graph, pair_sampling_baseline
from .matching import knuth_shuffle, make_rng, matching_sum
from .maxsquare import MaxSquareSumInstance, analytic_bound, greedy_optimum
from .median import iteration_queries, las_vegas_median
from .metrics import DistanceOracle, MetricInstance, Reference, reference

STATS_HEADER = ("trial", "seed", "matching_sum", "queries")
MEDIAN_HEADER = ("seed", "n", "epsilon", "point", "cost", "opt", "ratio", "iterations", "queries", "fallback")
AVGDIST_HEADER = ("seed", "method", "n", "epsilon_or_t", "value", "r_bar", "ratio", "queries")
MAXSQ_HEADER = ("n", "r_bar", "cap", "greedy_objective", "analytic_bound", "gap")
ADVERSARY_HEADER = (
    "algorithm", "seed", "n", "epsilon", "queries", "threshold", "refused",
    "p", "p_hat", "cost_p", "cost_p_hat", "ratio",
)

REL_SLACK = 1e-9


class InvariantViolation(AssertionError):
    def __init__(self, name: str, detail: str):
        super().__init__(f"{name}: {detail}")
        self.name = name


def run_trials(fn: Callable[[int], tuple], seeds: Sequence[int], parallel: int = 1) -> list[tuple]:
    """Map ``fn`` over seeds, keeping seed order whatever the completion order."""
    if parallel <= 1 or len(seeds) < 2:
        return [fn(s) for s in seeds]
    with ProcessPoolExecutor(max_workers=parallel) as ex:
        return list(ex.map(fn, seeds, chunksize=max(1, len(seeds) // (4 * parallel))))


def _seeds(base_seed: int, trials: int) -> list[int]:
    return [base_seed + i for i in range(trials)]


# -- stats -----------------------------------------------------------------


def _stats_trial(instance: MetricInstance, cap: float, seed: int) -> tuple:
    oracle = DistanceOracle(instance)
    ms = matching_sum(oracle, knuth_shuffle(instance.n, make_rng(seed)))
    if ms.value > cap * (1 + REL_SLACK):
        raise InvariantViolation("matching_cap", f"seed {seed}: matching sum {ms.value!r} > n*r_bar = {cap!r}")
    return seed, ms.value, ms.queries_used


def stats_rows(instance: MetricInstance, trials: int, base_seed: int, parallel: int = 1,
               ref: Optional[Reference] = None) -> list[tuple]:
    ref = ref or reference(instance)
    fn = partial(_stats_trial, instance, instance.n * ref.r_bar)
    out = run_trials(fn, _seeds(base_seed, trials), parallel)
    return [(i, *row) for i, row in enumerate(out)]


# -- median ----------------------------------------------------------------


def _median_trial(instance: MetricInstance, epsilon: float, opt: float, seed: int) -> tuple:
    oracle = DistanceOracle(instance)
    res = las_vegas_median(oracle, epsilon, make_rng(seed))
    n = instance.n
    ratio = res.cost / opt if opt > 0 else 1.0
    if res.cost > (2 + epsilon) * opt * (1 + REL_SLACK):
        raise InvariantViolation("median_ratio", f"seed {seed}: cost {res.cost!r} > (2+eps)*OPT")
    expected = iteration_queries(n, epsilon)
    if any(q != expected for q in res.iteration_queries):
        raise InvariantViolation("median_queries", f"seed {seed}: iteration queries {res.iteration_queries} != {expected}")
    return (seed, n, epsilon, res.point, res.cost, opt, ratio, res.iterations, res.queries,
            str(res.fell_back_to_brute_force).lower())


def median_rows(instance: MetricInstance, epsilon: float, trials: int, base_seed: int,
                parallel: int = 1, ref: Optional[Reference] = None) -> list[tuple]:
    ref = ref or reference(instance)
    fn = partial(_median_trial, instance, epsilon, ref.opt)
    return run_trials(fn, _seeds(base_seed, trials), parallel)


# -- avgdist ---------------------------------------------------------------


def _avgdist_trial(instance: MetricInstance, method: str, param: float, r_bar: float, seed: int) -> tuple:
    oracle = DistanceOracle(instance)
    rng = make_rng(seed)
    if method == "matching_max":
        est = estimate_avg_general(oracle, param, rng)
        if est.value > r_bar * (1 + REL_SLACK):
            raise InvariantViolation("one_sided", f"seed {seed}: estimate {est.value!r} > r_bar {r_bar!r}")
    elif method == "graph_single_matching":
        est = estimate_avg_graph(oracle, rng)
    elif method == "pair_sampling":
        est = pair_sampling_baseline(oracle, int(param), rng)
    else:
        raise ValueError(f"unknown method {method!r}")
    ratio = est.value / r_bar if r_bar > 0 else float("nan")
    return seed, method, instance.n, param, est.value, r_bar, ratio, est.queries


def avgdist_rows(instance: MetricInstance, method: str, param: float, trials: int, base_seed: int,
                 parallel: int = 1, ref: Optional[Reference] = None) -> list[tuple]:
    ref = ref or reference(instance)
    if method == "pair_sampling":
        param = int(param)
    fn = partial(_avgdist_trial, instance, method, param, ref.r_bar)
    return run_trials(fn, _seeds(base_seed, trials), parallel)


# -- maxsq -----------------------------------------------------------------


def random_maxsq_instance(rng: np.random.Generator, n_max: int = 64) -> MaxSquareSumInstance:
    """n uniform in [2, n_max]; r_bar log-uniform; cap log-uniform in [r_bar, n^2 r_bar]."""
    n = int(rng.integers(2, n_max + 1))
    r_bar = float(math.exp(rng.uniform(math.log(0.01), math.log(100.0))))
    cap = r_bar * float(math.exp(rng.uniform(0.0, math.log(n * n))))
    return MaxSquareSumInstance(n, r_bar, cap)


def _maxsq_row(inst: MaxSquareSumInstance) -> tuple:
    greedy = greedy_optimum(inst).objective
    bound = analytic_bound(inst)
    if greedy > bound * (1 + REL_SLACK):
        raise InvariantViolation("maxsq_bound", f"greedy {greedy!r} > bound {bound!r} for {inst}")
    return inst.n, inst.r_bar, inst.cap, greedy, bound, bound - greedy


def maxsq_rows(trials: int, base_seed: int, n_max: int = 64,
               fixed: Optional[MaxSquareSumInstance] = None) -> list[tuple]:
    if fixed is not None:
        return [_maxsq_row(fixed)]
    return [_maxsq_row(random_maxsq_instance(make_rng(s), n_max)) for s in _seeds(base_seed, trials)]


# -- adversary -------------------------------------------------------------


def _adversary_trial(name: str, k: Optional[int], n: int, epsilon: float, seed: int) -> tuple:
    t = adv.record_run(adv.stub(name, k), n, make_rng(seed))
    fr = adv.construct_fooling_metric(t, epsilon)
    threshold = adv.query_threshold(n, epsilon)
    q = len(t.pairs)
    if isinstance(fr, adv.Refusal):
        return name, seed, n, epsilon, q, threshold, "true", t.output_p, "", "", "", ""
    report = adv.verify_fooling(fr, t, epsilon, raise_on_failure=False)
    if not report.ok:
        raise InvariantViolation("fooling", f"seed {seed}: failed {', '.join(report.failed())}")
    return (name, seed, n, epsilon, q, threshold, "false", t.output_p, fr.p_hat,
            fr.cost_p, fr.cost_p_hat, fr.achieved_ratio)


def adversary_rows(name: str, n: int, epsilon: float, trials: int, base_seed: int,
                   k: Optional[int] = None, parallel: int = 1) -> list[tuple]:
    fn = partial(_adversary_trial, name, k, n, epsilon)
    return run_trials(fn, _seeds(base_seed, trials), parallel)

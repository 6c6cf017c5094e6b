"""1-median selection that is always (2 + eps)-approximate.

A Monte Carlo candidate is accepted only when its exact distance sum is
within (2 + eps) of some random matching sum. Every matching sum is at most
the optimal distance sum, so an accepted candidate carries its own proof of
quality. If acceptance keeps failing the search falls back to brute force.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .matching import draw_matching_sums
from .metrics import DistanceOracle, brute_force_median, exact_sum_cost, reference

StandIn = Callable[[DistanceOracle, float, np.random.Generator], int]

BUDGET_CONSTANT = 16
FAILURE_TARGET = 1 / math.e


def matchings_per_iteration(epsilon: float) -> int:
    return 80 * math.ceil(1 / epsilon)


def stand_in_sizes(epsilon: float) -> tuple[int, int]:
    """(candidates, targets per candidate) for the stand-in."""
    s = math.ceil(4 / epsilon)
    return s, s


@dataclass(frozen=True)
class ApproxMedianContract:
    """What the Monte Carlo subroutine promises: (1+eps) w.p. >= 1 - 1/e
    within ``query_budget`` queries. The stand-in below only honours the
    budget by construction; its success rate is measured, not proven."""

    epsilon: float
    query_budget: int
    failure_probability_target: float = FAILURE_TARGET

    @classmethod
    def for_instance(cls, n: int, epsilon: float, c: int = BUDGET_CONSTANT) -> "ApproxMedianContract":
        return cls(epsilon, math.floor(c * n / epsilon**2))


class BudgetExceeded(RuntimeError):
    pass


def stand_in_queries(n: int, epsilon: float) -> int:
    if n < 2:
        return 0
    s, t = stand_in_sizes(epsilon)
    return s * t


def approx_median_stand_in(
    oracle: DistanceOracle, epsilon: float, rng: np.random.Generator, c: int = BUDGET_CONSTANT
) -> int:
    """Sampled 1-median candidate.

    Draws ceil(4/eps) candidates uniformly, estimates each one's cost from
    ceil(4/eps) uniform targets other than itself, and returns the candidate
    with the smallest estimate (first one on ties). Uses exactly
    ``stand_in_queries(n, eps)`` queries, which is below c*n/eps^2.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    n = oracle.n
    if n == 1:
        return 1
    budget = ApproxMedianContract.for_instance(n, epsilon, c).query_budget
    s, t = stand_in_sizes(epsilon)
    before = oracle.queries
    cands = rng.integers(1, n + 1, size=s)
    # uniform over [n] minus the candidate: draw from 1..n-1, shift past it
    u = rng.integers(1, n, size=(s, t))
    targets = np.where(u >= cands[:, None], u + 1, u)
    est = oracle.dist_many(np.repeat(cands, t), targets.ravel()).reshape(s, t).mean(axis=1)
    if oracle.queries - before > budget:
        raise BudgetExceeded(f"stand-in used {oracle.queries - before} > {budget} queries")
    return int(cands[int(np.argmin(est))])


@dataclass
class Iteration:
    """One pass of the loop body: candidate, its exact cost, the matchings."""

    z: int
    cost: float
    matchings: np.ndarray
    queries: int

    def certified(self, epsilon: float) -> bool:
        return bool(self.matchings.size) and self.cost <= (2 + epsilon) * float(self.matchings.max())


def las_vegas_iteration(
    oracle: DistanceOracle, epsilon: float, rng: np.random.Generator, stand_in: Optional[StandIn] = None
) -> Iteration:
    before = oracle.queries
    z = (stand_in or approx_median_stand_in)(oracle, epsilon / 8, rng)
    matchings = draw_matching_sums(oracle, matchings_per_iteration(epsilon), rng)
    cost = exact_sum_cost(oracle, z)
    return Iteration(z, cost, matchings, oracle.queries - before)


def iteration_queries(n: int, epsilon: float) -> int:
    """Exact oracle cost of one loop pass."""
    return stand_in_queries(n, epsilon / 8) + (n - 1) + matchings_per_iteration(epsilon) * (n // 2)


@dataclass
class MedianResult:
    point: int
    cost: float
    ratio_certificate: float
    iterations: int
    queries: int
    fell_back_to_brute_force: bool
    witness_matching: Optional[float] = None
    iteration_queries: list[int] = field(default_factory=list)


def las_vegas_median(
    oracle: DistanceOracle,
    epsilon: float,
    rng: np.random.Generator,
    stand_in: Optional[StandIn] = None,
) -> MedianResult:
    """Always returns a (2 + eps)-approximate 1-median.

    Each iteration checks all 80*ceil(1/eps) matchings against the
    candidate's exact cost. Once n^2 queries have been spent without a
    certificate, the brute-force median is returned instead. ``stand_in``
    replaces the Monte Carlo candidate picker; it is called with eps/8, so
    eps = 1 is allowed here.
    """
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    n = oracle.n
    if n < 2:
        raise ValueError("need n >= 2")
    start = oracle.queries
    per_iter: list[int] = []
    while True:
        if oracle.queries - start >= n * n:
            p, cost = brute_force_median(oracle)
            return MedianResult(
                point=p,
                cost=cost,
                ratio_certificate=1.0,
                iterations=len(per_iter),
                queries=oracle.queries - start,
                fell_back_to_brute_force=True,
                iteration_queries=per_iter,
            )
        it = las_vegas_iteration(oracle, epsilon, rng, stand_in)
        per_iter.append(it.queries)
        if it.certified(epsilon):
            best = float(it.matchings.max())
            return MedianResult(
                point=it.z,
                cost=it.cost,
                ratio_certificate=it.cost / best,
                iterations=len(per_iter),
                queries=oracle.queries - start,
                fell_back_to_brute_force=False,
                witness_matching=best,
                iteration_queries=per_iter,
            )


@dataclass(frozen=True)
class ProbeResult:
    iterations: int
    return_rate: float
    one_plus_eps_rate: float
    large_matching_rate: float
    returned: int


def success_probability_probe(
    oracle: DistanceOracle, epsilon: float, runs: int, rng: np.random.Generator
) -> ProbeResult:
    """Run ``runs`` independent loop iterations and tally three events.

    return_rate: the certificate check passes.
    one_plus_eps_rate: among passing iterations, the candidate's cost is
        within (1 + eps) of the optimum.
    large_matching_rate: some matching reaches (1/2 - eps/8) * n * r_bar.
    Ground truth comes from a separate oracle so ``oracle``'s ledger only
    sees the iterations.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    ref = reference(oracle.instance)
    n = oracle.n
    threshold = (0.5 - epsilon / 8) * n * ref.r_bar
    passed = good = large = 0
    for _ in range(runs):
        it = las_vegas_iteration(oracle, epsilon, rng)
        if it.certified(epsilon):
            passed += 1
            if it.cost <= (1 + epsilon) * ref.opt:
                good += 1
        if it.matchings.max() >= threshold:
            large += 1
    return ProbeResult(
        iterations=runs,
        return_rate=passed / runs,
        one_plus_eps_rate=good / passed if passed else float("nan"),
        large_matching_rate=large / runs,
        returned=passed,
    )

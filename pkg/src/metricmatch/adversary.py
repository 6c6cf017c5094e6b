"""Lower-bound harness for 1-median algorithms under the discrete metric.

An algorithm is run against the discrete metric while its queries are
recorded. If it asked fewer than eps*(n-1)^2/8 distinct pairs, some point
other than its output took part in few queries, and halving every unqueried
distance at that point yields a {1/2, 1}-valued metric that agrees with every
answer the algorithm saw but makes its output worse than (2 - eps)-optimal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .matching import draw_matching_sums
from .median import approx_median_stand_in
from .metrics import DistanceOracle, Discrete, brute_force_median, validate_metric

Algorithm = Callable[[DistanceOracle, np.random.Generator], int]


class SelfQuery(RuntimeError):
    """The algorithm asked for d(x, x), which the harness forbids."""


class _RecordingOracle(DistanceOracle):
    def dist_many(self, xs, ys):
        xs = np.asarray(xs, dtype=np.int64).ravel()
        ys = np.asarray(ys, dtype=np.int64).ravel()
        if np.any(xs == ys):
            x = int(xs[xs == ys][0])
            raise SelfQuery(f"algorithm queried d({x}, {x})")
        return super().dist_many(xs, ys)


@dataclass
class QueryTranscript:
    n: int
    pairs: set[tuple[int, int]]
    answers: dict[tuple[int, int], float]
    output_p: int
    raw_queries: int = 0

    def involvement(self) -> np.ndarray:
        """Per-point count of transcript pairs touching it (index 0 unused)."""
        counts = np.zeros(self.n + 1, dtype=np.int64)
        for a, b in self.pairs:
            counts[a] += 1
            counts[b] += 1
        return counts


def record_run(algorithm: Algorithm, n: int, rng: np.random.Generator) -> QueryTranscript:
    """Run ``algorithm`` on the discrete metric and pad its transcript.

    After the run every pair (p, y) with y != p is added, p being the output,
    so the transcript witnesses p's full cost of n - 1.
    """
    oracle = _RecordingOracle(Discrete(n), trace=True)
    p = int(algorithm(oracle, rng))
    if not 1 <= p <= n:
        raise ValueError(f"algorithm returned {p}, outside 1..{n}")
    pairs = set(oracle.ledger.trace)
    for y in range(1, n + 1):
        if y != p:
            pairs.add((min(p, y), max(p, y)))
    answers = {pr: 1.0 for pr in pairs}
    return QueryTranscript(n, pairs, answers, p, raw_queries=oracle.queries)


def query_threshold(n: int, epsilon: float) -> float:
    return epsilon * (n - 1) ** 2 / 8


@dataclass
class FoolingResult:
    p_hat: int
    metric: np.ndarray
    cost_p: float
    cost_p_hat: float
    achieved_ratio: float
    involvement_of_p_hat: int


@dataclass(frozen=True)
class Refusal:
    reason: str
    queries: int
    threshold: float


def construct_fooling_metric(t: QueryTranscript, epsilon: float) -> FoolingResult | Refusal:
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    n = t.n
    threshold = query_threshold(n, epsilon)
    if len(t.pairs) >= threshold:
        return Refusal("budget_met", len(t.pairs), threshold)
    inv = t.involvement()
    inv[0] = np.iinfo(np.int64).max
    inv[t.output_p] = np.iinfo(np.int64).max
    p_hat = int(np.argmin(inv))
    f = 1.0 - np.eye(n)
    for y in range(1, n + 1):
        if y != p_hat and (min(p_hat, y), max(p_hat, y)) not in t.pairs:
            f[p_hat - 1, y - 1] = f[y - 1, p_hat - 1] = 0.5
    costs = f.sum(axis=1)
    cost_p = float(costs[t.output_p - 1])
    return FoolingResult(
        p_hat=p_hat,
        metric=f,
        cost_p=cost_p,
        cost_p_hat=float(costs[p_hat - 1]),
        achieved_ratio=cost_p / float(costs.min()),
        involvement_of_p_hat=int(t.involvement()[p_hat]),
    )


class VerificationFailure(AssertionError):
    pass


@dataclass(frozen=True)
class VerificationReport:
    checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]


def verify_fooling(
    fr: FoolingResult, t: QueryTranscript, epsilon: float, raise_on_failure: bool = True
) -> VerificationReport:
    """Re-check a fooling metric against its transcript.

    Six named checks: is_metric, consistent, involvement_bound, cost_p,
    cost_p_hat_bound, ratio_above.
    """
    n = t.n
    f = np.asarray(fr.metric, dtype=float)
    q = len(t.pairs)
    checks = {
        "is_metric": validate_metric(f, rel_tol=0.0) is None,
        "consistent": all(f[a - 1, b - 1] == v for (a, b), v in t.answers.items()),
        "involvement_bound": fr.involvement_of_p_hat <= 2 * q / (n - 1),
        "cost_p": fr.cost_p == n - 1 and float(f[t.output_p - 1].sum()) == n - 1,
        "cost_p_hat_bound": fr.cost_p_hat < (0.5 + epsilon / 8) * (n - 1),
        "ratio_above": fr.achieved_ratio > 2 - epsilon,
    }
    report = VerificationReport(checks)
    if raise_on_failure and not report.ok:
        raise VerificationFailure(f"fooling metric failed: {', '.join(report.failed())}")
    return report


# --------------------------------------------------------------------------
# stub algorithms for the harness


def query_nothing(oracle: DistanceOracle, rng: np.random.Generator) -> int:
    return 1


def random_k_queries(k: int) -> Algorithm:
    """Query k random distinct pairs, output the point with the smallest
    observed sum (point 1 if nothing distinguishes them)."""

    def algorithm(oracle: DistanceOracle, rng: np.random.Generator) -> int:
        n = oracle.n
        if k == 0 or n < 2:
            return 1
        xs = rng.integers(1, n + 1, size=k)
        off = rng.integers(1, n, size=k)
        ys = (xs - 1 + off) % n + 1
        d = oracle.dist_many(xs, ys)
        seen = np.zeros(n + 1)
        np.add.at(seen, xs, d)
        np.add.at(seen, ys, d)
        return int(np.argmin(seen[1:])) + 1

    algorithm.__name__ = f"random_{k}_queries"
    return algorithm


def truncated_las_vegas(cap: int) -> Algorithm:
    """One Las Vegas pass cut short after ``cap`` queries.

    Picks a stand-in candidate with eps = 1/2, then draws matchings until
    the next one would cross the cap, and outputs the candidate. Its exact
    cost is skipped since that alone costs n - 1 queries.
    """

    def algorithm(oracle: DistanceOracle, rng: np.random.Generator) -> int:
        n = oracle.n
        if n < 2:
            return 1
        z = approx_median_stand_in(oracle, 0.5, rng)
        while oracle.queries + n // 2 <= cap:
            draw_matching_sums(oracle, 1, rng)
        return z

    algorithm.__name__ = f"truncated_las_vegas_{cap}"
    return algorithm


def brute_force_algorithm(oracle: DistanceOracle, rng: np.random.Generator) -> int:
    return brute_force_median(oracle)[0]


def stub(name: str, k: Optional[int] = None) -> Algorithm:
    if name == "query-nothing":
        return query_nothing
    if name == "random-k":
        return random_k_queries(100 if k is None else k)
    if name == "truncated-las-vegas":
        return truncated_las_vegas(400 if k is None else k)
    if name == "brute-force":
        return brute_force_algorithm
    raise ValueError(f"unknown algorithm {name!r}")


STUBS = ("query-nothing", "random-k", "truncated-las-vegas", "brute-force")

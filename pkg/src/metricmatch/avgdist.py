"""Average-distance estimators built on random matchings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matching import draw_matching_sums
from .median import matchings_per_iteration
from .metrics import DistanceOracle, Graph, reference

METHODS = ("matching_max", "graph_single_matching", "pair_sampling")


@dataclass(frozen=True)
class AvgDistanceEstimate:
    value: float
    method: str
    queries: int
    permutations_used: int


def estimate_avg_general(
    oracle: DistanceOracle, epsilon: float, rng: np.random.Generator
) -> AvgDistanceEstimate:
    """(1/n) * max over 80*ceil(1/eps) matchings.

    Never exceeds the true average distance, since no matching sum exceeds
    n * r_bar.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    n = oracle.n
    if n < 2:
        raise ValueError("need n >= 2")
    m = matchings_per_iteration(epsilon)
    before = oracle.queries
    sums = draw_matching_sums(oracle, m, rng)
    return AvgDistanceEstimate(float(sums.max()) / n, "matching_max", oracle.queries - before, m)


def estimate_avg_graph(oracle: DistanceOracle, rng: np.random.Generator) -> AvgDistanceEstimate:
    """One random matching, scaled by 2/n. Costs floor(n/2) queries."""
    if not isinstance(oracle.instance, Graph):
        raise TypeError("estimate_avg_graph needs a Graph instance")
    n = oracle.n
    if n < 2:
        raise ValueError("need n >= 2")
    before = oracle.queries
    (s,) = draw_matching_sums(oracle, 1, rng)
    return AvgDistanceEstimate(float(s) * 2 / n, "graph_single_matching", oracle.queries - before, 1)


def pair_sampling_baseline(oracle: DistanceOracle, t: int, rng: np.random.Generator) -> AvgDistanceEstimate:
    """Mean distance over t uniform ordered pairs, x = y allowed.

    Including the diagonal makes this unbiased for r_bar exactly.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    n = oracle.n
    before = oracle.queries
    xs = rng.integers(1, n + 1, size=t)
    ys = rng.integers(1, n + 1, size=t)
    value = float(oracle.dist_many(xs, ys).mean())
    return AvgDistanceEstimate(value, "pair_sampling", oracle.queries - before, 0)


def expected_graph_estimate(n: int, r_bar: float) -> float:
    """Mean of the scaled single-matching estimator: (2/n) floor(n/2) n r_bar / (n-1)."""
    if n < 2:
        return 0.0
    return 2 * (n // 2) * r_bar / (n - 1)


@dataclass(frozen=True)
class GraphDiagnostics:
    Delta: float
    r: float
    r_bar: float
    delta: float
    path_bound_ok: bool
    unit_bound_ok: bool
    ball_cover_ok: bool
    r_bar_le_2r: bool


def graph_diagnostics(oracle: DistanceOracle, delta: float) -> GraphDiagnostics:
    """Exact checks of the inequalities that drive the graph estimator.

    path_bound_ok: n*r >= Delta^2 / 4 (a diameter path is expensive to serve)
    unit_bound_ok: r >= 1/2 (every other vertex is at least one hop away)
    ball_cover_ok: delta*n*r >= Delta (every distance fits under the cap)
    r_bar_le_2r:   r_bar <= 2r
    """
    if not isinstance(oracle.instance, Graph):
        raise TypeError("graph_diagnostics needs a Graph instance")
    ref = reference(oracle.instance)
    n, r, Delta = ref.n, ref.r, ref.Delta
    return GraphDiagnostics(
        Delta=Delta,
        r=r,
        r_bar=ref.r_bar,
        delta=delta,
        path_bound_ok=n * r >= Delta**2 / 4,
        unit_bound_ok=(r >= 0.5) if n >= 2 else True,
        ball_cover_ok=delta * n * r >= Delta,
        r_bar_le_2r=ref.r_bar <= 2 * r,
    )

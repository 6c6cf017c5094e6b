"""Seeded instance families used by the experiments.

None of these families comes from the analysis itself; they are simply
cheap, varied metrics to run the estimators on.
"""
from __future__ import annotations

import math

import numpy as np

from .metrics import Discrete, EuclideanPoints, ExplicitMatrix, Graph, MetricInstance

FAMILIES = ("euclidean", "graph-gnp", "graph-tree", "discrete", "matrix")
MAX_GNP_RETRIES = 100


class GenerationError(RuntimeError):
    pass


def euclidean(n: int, dim: int, rng: np.random.Generator, norm=2) -> EuclideanPoints:
    """n points uniform in the unit cube [0, 1]^dim."""
    return EuclideanPoints(rng.random((n, dim)), norm=norm)


def gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Connected Erdos-Renyi graph, resampled until connected."""
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(MAX_GNP_RETRIES):
        keep = rng.random(len(iu)) < p
        try:
            return Graph(n, np.column_stack([iu[keep] + 1, ju[keep] + 1]))
        except ValueError:
            continue
    raise GenerationError(f"G({n}, {p}) stayed disconnected after {MAX_GNP_RETRIES} tries")


def default_gnp_p(n: int) -> float:
    """2 ln n / n, comfortably above the connectivity threshold."""
    return min(1.0, 2.0 * math.log(max(n, 2)) / max(n, 2))


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    """Random recursive tree with randomly relabelled vertices."""
    if n == 1:
        return Graph(1, [])
    parents = np.array([rng.integers(0, i) for i in range(1, n)])
    label = rng.permutation(n) + 1
    edges = np.column_stack([label[np.arange(1, n)], label[parents]])
    return Graph(n, edges)


def random_matrix(n: int, rng: np.random.Generator) -> ExplicitMatrix:
    """Symmetric distances uniform in [1, 2]; any such table is a metric."""
    m = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    vals = 1.0 + rng.random(len(iu))
    m[iu, ju] = vals
    m[ju, iu] = vals
    return ExplicitMatrix(m, check=False)


def generate(
    family: str,
    n: int,
    seed: int,
    dim: int = 2,
    p: float | None = None,
    norm=2,
) -> MetricInstance:
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if family == "discrete":
        return Discrete(n)
    if family == "euclidean":
        return euclidean(n, dim, rng, norm=norm)
    if family == "graph-gnp":
        return gnp(n, default_gnp_p(n) if p is None else p, rng)
    if family == "graph-tree":
        return random_tree(n, rng)
    if family == "matrix":
        return random_matrix(n, rng)
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(1, n)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, i % n + 1) for i in range(1, n + 1)])


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with the centre at vertex 1."""
    return Graph(leaves + 1, [(1, i) for i in range(2, leaves + 2)])

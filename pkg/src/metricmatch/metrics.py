"""Finite metric spaces behind a counted distance oracle.

Points are numbered ``1..n`` at every public entry point. Internally the
instances work on 0-based numpy indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path


class MetricError(ValueError):
    """Raised when an instance is not a valid finite metric."""


@dataclass(frozen=True)
class Violation:
    """First failing axiom found by :func:`validate_metric`.

    ``witness`` holds 1-based point ids: a single point for ``diagonal``,
    a pair for ``nonfinite``/``negative``/``symmetry``/``identity``, a
    triple ``(x, y, z)`` with ``d(x,y) + d(y,z) < d(x,z)`` for ``triangle``.
    """

    kind: str
    witness: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.kind} violation at {self.witness}"


# --------------------------------------------------------------------------
# instances


class Discrete:
    """d(x, y) = 1 for x != y."""

    exact = True

    def __init__(self, n: int):
        if n < 1:
            raise MetricError("need n >= 1")
        self.n = int(n)

    def pair_distances(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return (xs != ys).astype(float)

    def to_matrix(self) -> np.ndarray:
        return 1.0 - np.eye(self.n)

    def __repr__(self) -> str:
        return f"Discrete({self.n})"


class ExplicitMatrix:
    """A metric given as a full n x n distance table."""

    exact = False

    def __init__(self, matrix, check: bool = True, rel_tol: float = 1e-9):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise MetricError(f"expected a non-empty square matrix, got shape {m.shape}")
        if check:
            v = validate_metric(m, rel_tol=rel_tol)
            if v is not None:
                raise MetricError(str(v))
        m.setflags(write=False)
        self.matrix = m
        self.n = m.shape[0]

    def pair_distances(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return self.matrix[xs, ys]

    def to_matrix(self) -> np.ndarray:
        return self.matrix.copy()

    def __repr__(self) -> str:
        return f"ExplicitMatrix(n={self.n})"


class EuclideanPoints:
    """Points in R^D under the 1-, 2- or max-norm."""

    exact = False

    def __init__(self, points, norm: Union[int, float, str] = 2):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise MetricError("points must be an (n, D) array with n >= 1")
        if not np.all(np.isfinite(pts)):
            raise MetricError("points contain NaN or infinity")
        if norm in ("inf", "max"):
            norm = np.inf
        if norm not in (1, 2, np.inf):
            raise MetricError(f"unsupported norm {norm!r}; use 1, 2 or inf")
        pts.setflags(write=False)
        self.points = pts
        self.norm = norm
        self.n = pts.shape[0]
        # distinct coordinates are required for d(x, y) > 0
        if len(np.unique(pts, axis=0)) != self.n:
            raise MetricError("duplicate points violate identity of indiscernibles")

    def pair_distances(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        diff = self.points[xs] - self.points[ys]
        return np.linalg.norm(diff, ord=self.norm, axis=-1)

    def to_matrix(self) -> np.ndarray:
        diff = self.points[:, None, :] - self.points[None, :, :]
        return np.linalg.norm(diff, ord=self.norm, axis=-1)

    def __repr__(self) -> str:
        return f"EuclideanPoints(n={self.n}, D={self.points.shape[1]}, norm={self.norm})"


class Graph:
    """Hop metric of a connected, undirected, unweighted graph on 1..n.

    Edges are 1-based ``(u, v)`` pairs. Duplicates are tolerated; self-loops
    and disconnected graphs are rejected.
    """

    exact = True

    def __init__(self, n: int, edges: Sequence[tuple[int, int]]):
        if n < 1:
            raise MetricError("need n >= 1")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 1 or e.max() > n):
            raise MetricError(f"edge endpoint outside 1..{n}")
        if np.any(e[:, 0] == e[:, 1]):
            u = int(e[e[:, 0] == e[:, 1]][0, 0])
            raise MetricError(f"self-loop at vertex {u}")
        e = np.unique(np.sort(e, axis=1), axis=0)
        e.setflags(write=False)
        self.n = int(n)
        self.edges = e
        u, v = e[:, 0] - 1, e[:, 1] - 1
        data = np.ones(2 * len(e))
        self.adjacency = coo_matrix(
            (data, (np.concatenate([u, v]), np.concatenate([v, u]))), shape=(n, n)
        ).tocsr()
        ncomp, labels = connected_components(self.adjacency, directed=False)
        if ncomp > 1:
            bad = int(np.flatnonzero(labels != labels[0])[0]) + 1
            raise MetricError(f"graph is disconnected: vertex {bad} unreachable from vertex 1")

    def bfs(self, sources: np.ndarray) -> np.ndarray:
        """Hop distances from each 0-based source, one row per source."""
        d = shortest_path(self.adjacency, method="D", unweighted=True, indices=sources)
        return np.atleast_2d(d).astype(np.int64)

    def to_matrix(self) -> np.ndarray:
        return self.bfs(np.arange(self.n)).astype(float)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={len(self.edges)})"


MetricInstance = Union[Discrete, ExplicitMatrix, EuclideanPoints, Graph]


# --------------------------------------------------------------------------
# oracle


@dataclass
class QueryLedger:
    count: int = 0
    trace: Optional[list[tuple[int, int]]] = None

    def record(self, xs: np.ndarray, ys: np.ndarray) -> None:
        self.count += len(xs)
        if self.trace is not None:
            lo = np.minimum(xs, ys).tolist()
            hi = np.maximum(xs, ys).tolist()
            self.trace.extend(zip(lo, hi))


@dataclass
class DistanceOracle:
    """Counted query access to a :data:`MetricInstance`.

    Every answered pair costs one query, including ``d(x, x)``. For graph
    instances the BFS rows are cached per source; ``bfs_runs`` reports the
    traversals separately from the query count.
    """

    instance: MetricInstance
    trace: bool = False
    ledger: QueryLedger = field(init=False)
    bfs_runs: int = field(init=False, default=0)

    def __post_init__(self):
        self.ledger = QueryLedger(trace=[] if self.trace else None)
        self._rows: Optional[np.ndarray] = None
        self._have: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def queries(self) -> int:
        return self.ledger.count

    def _check(self, a: np.ndarray) -> np.ndarray:
        if a.size and (a.min() < 1 or a.max() > self.n):
            bad = a[(a < 1) | (a > self.n)][0]
            raise IndexError(f"point {bad} outside 1..{self.n}")
        return a - 1

    def dist(self, x: int, y: int) -> float:
        return float(self.dist_many([x], [y])[0])

    __call__ = dist

    def dist_many(self, xs, ys) -> np.ndarray:
        """Answer ``d(xs[i], ys[i])`` for every i; costs ``len(xs)`` queries."""
        xs = np.asarray(xs, dtype=np.int64).ravel()
        ys = np.asarray(ys, dtype=np.int64).ravel()
        if xs.shape != ys.shape:
            raise ValueError("xs and ys differ in length")
        i, j = self._check(xs), self._check(ys)
        self.ledger.record(xs, ys)
        if isinstance(self.instance, Graph):
            return self._graph_distances(i, j)
        return np.asarray(self.instance.pair_distances(i, j), dtype=float)

    def _ensure_rows(self, sources: np.ndarray) -> None:
        if self._rows is None:
            n = self.n
            self._rows = np.zeros((n, n), dtype=np.int32)
            self._have = np.zeros(n, dtype=bool)
        missing = np.unique(sources[~self._have[sources]])
        if missing.size:
            self._rows[missing] = self.instance.bfs(missing)
            self._have[missing] = True
            self.bfs_runs += int(missing.size)

    def _graph_distances(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        if self._have is None:
            self._ensure_rows(i[:0])
        # route each pair through whichever endpoint is already cached
        swap = ~self._have[i] & self._have[j]
        src = np.where(swap, j, i)
        dst = np.where(swap, i, j)
        self._ensure_rows(src)
        return self._rows[src, dst].astype(float)


def oracle_for(instance: MetricInstance, trace: bool = False) -> DistanceOracle:
    return DistanceOracle(instance, trace=trace)


def dist(oracle: DistanceOracle, x: int, y: int) -> float:
    return oracle.dist(x, y)


def graph_distances_from(oracle: DistanceOracle, s: int) -> np.ndarray:
    """Exact BFS hop distances from ``s`` to every vertex, as a length-n vector.

    Reads the oracle's per-source cache, so this costs no queries and at most
    one traversal per distinct source.
    """
    if not isinstance(oracle.instance, Graph):
        raise TypeError("graph_distances_from needs a Graph instance")
    (s0,) = oracle._check(np.array([s]))
    oracle._ensure_rows(np.array([s0]))
    return oracle._rows[s0].astype(np.int64)


# --------------------------------------------------------------------------
# validation


def validate_metric(matrix, rel_tol: float = 1e-9) -> Optional[Violation]:
    """Exhaustively check the metric axioms; return the first violation or None.

    Scan order is x ascending, then y, then z. Triangle checks allow a
    slack of ``rel_tol * d(x, z)``; pass ``rel_tol=0`` for exact instances.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    n = m.shape[0]

    def first(mask: np.ndarray) -> tuple[int, ...]:
        return tuple(int(k) + 1 for k in np.argwhere(mask)[0])

    bad = ~np.isfinite(m)
    if bad.any():
        return Violation("nonfinite", first(bad))
    if (m < 0).any():
        return Violation("negative", first(m < 0))
    diag = np.diag(m) != 0
    if diag.any():
        return Violation("diagonal", first(diag))
    if (m != m.T).any():
        return Violation("symmetry", first(m != m.T))
    off = ~np.eye(n, dtype=bool)
    zero = (m == 0) & off
    if zero.any():
        return Violation("identity", first(zero))
    for x in range(n):
        # via[y, z] = d(x,y) + d(y,z), compared against d(x,z)
        via = m[x][:, None] + m
        bad = via < m[x][None, :] * (1.0 - rel_tol)
        if bad.any():
            y, z = np.argwhere(bad)[0]
            return Violation("triangle", (x + 1, int(y) + 1, int(z) + 1))
    return None


# --------------------------------------------------------------------------
# brute-force references


def _all_pairs(oracle: DistanceOracle) -> np.ndarray:
    """Query every unordered distinct pair once and return the full matrix."""
    n = oracle.n
    iu, ju = np.triu_indices(n, k=1)
    d = oracle.dist_many(iu + 1, ju + 1)
    m = np.zeros((n, n))
    m[iu, ju] = d
    m[ju, iu] = d
    return m


def exact_sum_cost(oracle: DistanceOracle, p: int) -> float:
    """Sum of d(p, x) over all x, using exactly n - 1 queries."""
    n = oracle.n
    if not 1 <= p <= n:
        raise IndexError(f"point {p} outside 1..{n}")
    others = np.concatenate([np.arange(1, p), np.arange(p + 1, n + 1)])
    return float(oracle.dist_many(np.full(n - 1, p), others).sum())


def exact_average_distance(oracle: DistanceOracle) -> float:
    """Mean of d(x, y) over all n^2 ordered pairs, diagonal included."""
    n = oracle.n
    return float(_all_pairs(oracle).sum()) / n**2


def brute_force_median(oracle: DistanceOracle) -> tuple[int, float]:
    """Point minimizing the distance sum; ties go to the smallest index."""
    costs = _all_pairs(oracle).sum(axis=1)
    p = int(np.argmin(costs))
    return p + 1, float(costs[p])


def diameter(oracle: DistanceOracle) -> tuple[float, tuple[int, int]]:
    m = _all_pairs(oracle)
    x, y = np.unravel_index(int(np.argmax(m)), m.shape)
    if m[x, y] == 0:
        return 0.0, (1, 1)
    return float(m[x, y]), (int(x) + 1, int(y) + 1)


@dataclass(frozen=True)
class Reference:
    """Brute-force ground truth for one instance."""

    n: int
    r_bar: float
    median: int
    opt: float
    Delta: float
    witness: tuple[int, int]

    @property
    def r(self) -> float:
        return self.opt / self.n


def reference(instance: MetricInstance) -> Reference:
    """All brute-force quantities from one full enumeration on a fresh oracle."""
    m = _all_pairs(DistanceOracle(instance))
    n = instance.n
    costs = m.sum(axis=1)
    p = int(np.argmin(costs))
    x, y = np.unravel_index(int(np.argmax(m)), m.shape)
    witness = (int(x) + 1, int(y) + 1) if m[x, y] > 0 else (1, 1)
    return Reference(
        n=n,
        r_bar=float(m.sum()) / n**2,
        median=p + 1,
        opt=float(costs[p]),
        Delta=float(m[x, y]),
        witness=witness,
    )

"""Random matchings drawn from uniform permutations, and their moments."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .maxsquare import MaxSquareSumInstance, analytic_bound
from .metrics import DistanceOracle, _all_pairs


def make_rng(seed: int) -> np.random.Generator:
    """The one generator type used everywhere (PCG64, 64-bit seed)."""
    return np.random.Generator(np.random.PCG64(seed))


def knuth_shuffle(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform permutation of 1..n.

    For i = n down to 2, swap positions i and j with j uniform on [1, i].
    The n - 1 values of j are drawn in one batch, in that order.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    perm = list(range(1, n + 1))
    if n > 1:
        js = rng.integers(0, np.arange(n, 1, -1)).tolist()
        for i, j in zip(range(n - 1, 0, -1), js):
            perm[i], perm[j] = perm[j], perm[i]
    return np.array(perm, dtype=np.int64)


@dataclass(frozen=True)
class MatchingSum:
    value: float
    n: int
    queries_used: int


def matching_sum(oracle: DistanceOracle, pi: np.ndarray) -> MatchingSum:
    """Sum of d(pi[2i-1], pi[2i]) over i = 1..floor(n/2).

    With odd n the last entry stays unmatched.
    """
    pi = np.asarray(pi)
    n = oracle.n
    if len(pi) != n:
        raise ValueError(f"permutation has length {len(pi)}, oracle has n={n}")
    half = n // 2
    before = oracle.queries
    value = float(oracle.dist_many(pi[0 : 2 * half : 2], pi[1 : 2 * half : 2]).sum())
    return MatchingSum(value, n, oracle.queries - before)


def draw_matching_sums(oracle: DistanceOracle, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent matching sums, each from its own Knuth shuffle."""
    n = oracle.n
    half = n // 2
    if half == 0 or count == 0:
        return np.zeros(count)
    perms = np.stack([knuth_shuffle(n, rng) for _ in range(count)])
    d = oracle.dist_many(perms[:, 0 : 2 * half : 2], perms[:, 1 : 2 * half : 2])
    return d.reshape(count, half).sum(axis=1)


def expected_matching_sum(n: int, r_bar: float) -> float:
    """floor(n/2) * n * r_bar / (n - 1); 0 for n = 1."""
    if n < 2:
        return 0.0
    return (n // 2) * n * r_bar / (n - 1)


@dataclass(frozen=True)
class MatchingStats:
    trials: int
    mean: float
    variance: float
    std_error: float
    variance_std_error: float

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "MatchingStats":
        x = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
        t = len(x)
        if t < 2:
            raise ValueError("need at least two trials")
        mean = float(x.mean())
        var = float(x.var(ddof=1))
        # large-sample standard error of the unbiased variance estimate
        m4 = float(((x - mean) ** 4).mean())
        var_se = math.sqrt(max(m4 - var**2 * (t - 3) / (t - 1), 0.0) / t)
        return cls(t, mean, var, math.sqrt(var / t), var_se)


def empirical_matching_stats(
    oracle: DistanceOracle, trials: int, rng: np.random.Generator
) -> MatchingStats:
    if trials < 2:
        raise ValueError("need at least two trials")
    return MatchingStats.from_values(draw_matching_sums(oracle, trials, rng))


def exact_matching_moments(oracle: DistanceOracle) -> tuple[float, float]:
    """Exact mean and variance of the matching sum, by enumeration.

    A uniform permutation induces a uniform choice of the unmatched point
    (odd n) together with a uniform perfect matching of the rest, so it is
    enough to walk all perfect matchings. Feasible for n <= 12 or so.
    """
    n = oracle.n
    if n > 14:
        raise ValueError("enumeration is only meant for small n")
    d = _all_pairs(oracle)
    values: list[float] = []

    def walk(rest: tuple[int, ...], acc: float) -> None:
        if not rest:
            values.append(acc)
            return
        a = rest[0]
        for k in range(1, len(rest)):
            walk(rest[1:k] + rest[k + 1 :], acc + d[a, rest[k]])

    points = tuple(range(n))
    if n % 2 == 0:
        walk(points, 0.0)
    else:
        for left_out in points:
            walk(points[:left_out] + points[left_out + 1 :], 0.0)
    v = np.array(values)
    return float(v.mean()), float(v.var())


@dataclass(frozen=True)
class VarianceBoundInputs:
    n: int
    r_bar: float
    r: float
    delta: float
    Delta: float

    @property
    def cap(self) -> float:
        """Largest distance the bound allows, delta * n * r."""
        return self.delta * self.n * self.r


class BoundNotCertified(ValueError):
    pass


def variance_bound_exact(inp: VarianceBoundInputs) -> float:
    """Explicit finite-n upper bound on the variance of the matching sum.

    Second moment split into distinct-pair products (bounded through a
    uniform 4-subset) plus squared single distances (bounded by the max
    square sum value), minus the exact squared mean. Only certified when
    every distance fits under the cap ``delta * n * r``, i.e. cap >= Delta.
    """
    n, r_bar, r, delta = inp.n, inp.r_bar, inp.r, inp.delta
    if n < 4:
        raise BoundNotCertified(f"need n >= 4, got {n}")
    if min(r_bar, r, delta, inp.Delta) < 0:
        raise BoundNotCertified("inputs must be nonnegative")
    cap = inp.cap
    if cap < inp.Delta or cap <= 0:
        raise BoundNotCertified(
            f"delta*n*r = {cap:g} < Delta = {inp.Delta:g}; bound not certified"
        )
    half = n // 2
    cross = half * (half - 1) / (n * (n - 1) * (n - 2) * (n - 3)) * (n * n * r_bar) ** 2
    squares = analytic_bound(MaxSquareSumInstance(n, r_bar, cap)) if r_bar > 0 else 0.0
    mean = expected_matching_sum(n, r_bar)
    return cross + squares - mean**2


@dataclass(frozen=True)
class ChebyshevTail:
    mean: float
    variance: float
    k: float

    @property
    def bound(self) -> float:
        return 1.0 / self.k**2

    def outside(self, x) -> np.ndarray | bool:
        dev = np.abs(np.asarray(x) - self.mean)
        if self.variance == 0:
            # a point mass never deviates; only rounding noise can
            return dev > 1e-12 * max(1.0, abs(self.mean))
        return dev >= self.k * math.sqrt(self.variance)

    def outside_fraction(self, xs) -> float:
        return float(np.mean(self.outside(xs)))


def chebyshev_tail(mean: float, variance: float, k: float) -> ChebyshevTail:
    """Pr[|X - mean| >= k sd] <= 1/k^2; the returned object carries both sides."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if variance < 0:
        raise ValueError("variance must be >= 0")
    return ChebyshevTail(mean, variance, k)

"""MAX SQUARE SUM: maximize a scaled sum of squares over a capped simplex.

Variables are the n^2 table entries d_{x,y}. Constraints: they average to
r_bar and each lies in [0, cap]. The objective is

    floor(n/2) / (n (n-1)) * sum d_{x,y}^2.

The analysis is phrased with (n, r_bar, delta, r) but only cap = delta*n*r
matters: floor(n r_bar / (delta r)) = floor(n^2 r_bar / cap).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class Infeasible(ValueError):
    pass


def floor_ratio(num: float, den: float) -> int:
    """floor(num / den), snapping quotients within 1e-12 of an integer.

    Snapping upward only ever enlarges the bounds built on this, so float
    noise cannot make them unsound.
    """
    q = num / den
    k = math.floor(q)
    if q - k > 1.0 - 1e-12 * max(1.0, abs(q)):
        k += 1
    return k


@dataclass(frozen=True)
class MaxSquareSumInstance:
    n: int
    r_bar: float
    cap: float

    def __post_init__(self):
        if self.n < 2:
            raise Infeasible("n must be >= 2")
        if not (self.r_bar > 0 and self.cap > 0):
            raise Infeasible("r_bar and cap must be positive")
        if self.r_bar > self.cap * (1 + 1e-12):
            raise Infeasible(f"r_bar = {self.r_bar} exceeds cap = {self.cap}; no feasible table")

    @classmethod
    def from_delta(cls, n: int, r_bar: float, delta: float, r: float) -> "MaxSquareSumInstance":
        return cls(n, r_bar, delta * n * r)

    @property
    def coeff(self) -> float:
        return (self.n // 2) / (self.n * (self.n - 1))

    @property
    def total(self) -> float:
        return self.n**2 * self.r_bar

    @property
    def full_count(self) -> int:
        """How many entries can sit at the cap: floor(n^2 r_bar / cap)."""
        return floor_ratio(self.total, self.cap)


@dataclass(frozen=True)
class SquareSumSolution:
    values: np.ndarray
    objective: float
    at_cap_count: int
    support_size: int

    def residual(self, inst: MaxSquareSumInstance) -> float:
        """Relative violation of the sum constraint."""
        return abs(float(self.values.sum()) - inst.total) / inst.total


def _solution(inst: MaxSquareSumInstance, values: np.ndarray) -> SquareSumSolution:
    cap_tol = inst.cap * 1e-12
    return SquareSumSolution(
        values=values,
        objective=inst.coeff * float(np.dot(values, values)),
        at_cap_count=int(np.count_nonzero(values >= inst.cap - cap_tol)),
        support_size=int(np.count_nonzero(values > 0)),
    )


def analytic_bound(inst: MaxSquareSumInstance) -> float:
    """coeff * (floor(n^2 r_bar / cap) + 1) * cap^2."""
    return inst.coeff * (inst.full_count + 1) * inst.cap**2


def greedy_optimum(inst: MaxSquareSumInstance) -> SquareSumSolution:
    """Fill entries to the cap one by one; put the remainder in one more.

    The objective is convex and the feasible set is a polytope whose vertices
    have at most one entry strictly between 0 and cap, so this vertex is a
    maximizer.
    """
    size = inst.n**2
    k = min(inst.full_count, size)
    values = np.zeros(size)
    values[:k] = inst.cap
    rem = inst.total - k * inst.cap
    if rem > inst.total * 1e-12 and k < size:
        values[k] = rem
    return _solution(inst, values)


def random_feasible(
    inst: MaxSquareSumInstance, rng: np.random.Generator, max_rounds: int = 10_000
) -> SquareSumSolution:
    """A random point of the feasible set.

    Uniform simplex weights scaled to the required total, then any excess
    above the cap is clipped and handed to the uncapped entries in
    proportion to their current values.
    """
    size = inst.n**2
    values = rng.exponential(size=size)
    values *= inst.total / values.sum()
    for _ in range(max_rounds):
        over = values > inst.cap
        if not over.any():
            break
        excess = float((values[over] - inst.cap).sum())
        values[over] = inst.cap
        free = values < inst.cap
        room = float((inst.cap - values[free]).sum())
        if room <= excess:
            # only reachable when cap * n^2 is within rounding of the total
            values[free] = inst.cap
            break
        weights = values[free]
        share = weights / weights.sum() if weights.sum() > 0 else np.full(weights.size, 1 / weights.size)
        values[free] += excess * share
    else:
        raise RuntimeError("clip-and-redistribute did not converge")
    np.clip(values, 0.0, inst.cap, out=values)
    return _solution(inst, values)

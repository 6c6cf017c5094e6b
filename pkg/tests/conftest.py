import itertools

import numpy as np
import pytest

from metricmatch import Discrete, DistanceOracle, ExplicitMatrix
from metricmatch.generators import generate, path_graph


@pytest.fixture
def path4():
    return path_graph(4)


@pytest.fixture
def oracle4(path4):
    return DistanceOracle(path4)


def two_point(c: float) -> ExplicitMatrix:
    return ExplicitMatrix([[0.0, c], [c, 0.0]])


def permutation_moments(matrix) -> tuple[float, float]:
    """Mean and variance of the matching sum over all n! permutations.

    Independent of the library's matching enumeration: plain itertools over
    permutations, pairing positions (0,1), (2,3), ...
    """
    d = np.asarray(matrix, dtype=float)
    n = d.shape[0]
    vals = []
    for perm in itertools.permutations(range(n)):
        vals.append(sum(d[perm[2 * i], perm[2 * i + 1]] for i in range(n // 2)))
    v = np.array(vals)
    return float(v.mean()), float(v.var())


SMALL_FAMILIES = [
    ("discrete", 6),
    ("euclidean", 7),
    ("graph-gnp", 8),
    ("graph-tree", 7),
    ("matrix", 6),
]


def small_instances(seed: int = 0):
    return [generate(f, n, seed) for f, n in SMALL_FAMILIES]


@pytest.fixture
def discrete10():
    return Discrete(10)


# acceptance criteria append (number, passed, detail) here; printed at the end
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metricmatch import (
    Discrete,
    DistanceOracle,
    ExplicitMatrix,
    VarianceBoundInputs,
    chebyshev_tail,
    empirical_matching_stats,
    expected_matching_sum,
    knuth_shuffle,
    make_rng,
    matching_sum,
    reference,
    variance_bound_exact,
)
from metricmatch.matching import BoundNotCertified, MatchingStats, draw_matching_sums, exact_matching_moments

from metricmatch.generators import generate

from conftest import permutation_moments, small_instances, two_point

# 589/18: 100/3 + 21/2 - 100/9, from the three closed-form terms at
# n=4, r_bar=5/4, r=1, delta=3/4
PATH4_BOUND = Fraction(100, 3) + Fraction(21, 2) - Fraction(100, 9)


def test_shuffle_trivial_and_deterministic():
    assert knuth_shuffle(1, make_rng(3)).tolist() == [1]
    a = knuth_shuffle(50, make_rng(11))
    b = knuth_shuffle(50, make_rng(11))
    assert a.tolist() == b.tolist()
    assert sorted(a.tolist()) == list(range(1, 51))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 200), st.integers(0, 2**63 - 1))
def test_shuffle_is_a_bijection(n, seed):
    assert sorted(knuth_shuffle(n, make_rng(seed)).tolist()) == list(range(1, n + 1))


def test_shuffle_uniform_n3():
    # 6e5 draws; each of the 6 cells within 4 standard errors of 1/6
    draws = 600_000
    rng = make_rng(2024)
    counts = Counter(tuple(knuth_shuffle(3, rng).tolist()) for _ in range(draws))
    assert set(counts) == set(itertools.permutations((1, 2, 3)))
    se = math.sqrt((1 / 6) * (5 / 6) / draws)
    for perm, c in counts.items():
        assert abs(c / draws - 1 / 6) <= 4 * se, perm
    # chi-square on 5 dof; the 4-sigma upper point of chi2_5 is 28.31
    chi2 = sum((c - draws / 6) ** 2 / (draws / 6) for c in counts.values())
    assert chi2 < 28.31


def test_matching_sum_examples(oracle4):
    o = DistanceOracle(Discrete(4))
    for seed in range(5):
        ms = matching_sum(o, knuth_shuffle(4, make_rng(seed)))
        assert ms.value == 2 and ms.queries_used == 2
    ms = matching_sum(oracle4, np.array([1, 2, 3, 4]))
    assert ms.value == 2
    assert matching_sum(DistanceOracle(Discrete(1)), np.array([1])).value == 0


def test_matching_sum_odd_n_leaves_last_unmatched():
    o = DistanceOracle(ExplicitMatrix([[0, 1, 2], [1, 0, 2], [2, 2, 0]]))
    ms = matching_sum(o, np.array([1, 2, 3]))
    assert ms.value == 1 and ms.queries_used == 1


def test_matching_sum_size_mismatch(oracle4):
    with pytest.raises(ValueError):
        matching_sum(oracle4, np.array([1, 2, 3]))


def test_expected_matching_sum_examples():
    assert expected_matching_sum(4, 1.25) == pytest.approx(10 / 3, abs=1e-15)
    assert expected_matching_sum(4, 0.75) == 2
    assert expected_matching_sum(2, 2.5) == 5
    assert expected_matching_sum(1, 0.0) == 0


def test_path4_empirical_mean_and_variance(oracle4):
    st_ = empirical_matching_stats(oracle4, 50_000, make_rng(7))
    assert abs(st_.mean - 10 / 3) <= 3 * st_.std_error
    assert abs(st_.variance - 8 / 9) <= 4 * st_.variance_std_error
    assert oracle4.queries == 50_000 * 2


def test_discrete_variance_is_zero():
    st_ = empirical_matching_stats(DistanceOracle(Discrete(10)), 200, make_rng(1))
    assert st_.mean == 5 and st_.variance == 0


@pytest.mark.parametrize("n", range(2, 9))
def test_exact_enumeration_matches_closed_form(n):
    for family in ("euclidean", "graph-tree", "matrix", "discrete"):
        inst = generate(family, n, seed=n)
        ref = reference(inst)
        mean, var = exact_matching_moments(DistanceOracle(inst))
        assert mean == pytest.approx(expected_matching_sum(n, ref.r_bar), rel=1e-12, abs=1e-12)
        assert var >= -1e-12


@pytest.mark.parametrize("inst", small_instances(seed=5), ids=lambda i: repr(i))
def test_enumeration_agrees_with_permutations(inst):
    mean, var = exact_matching_moments(DistanceOracle(inst))
    pm, pv = permutation_moments(inst.to_matrix())
    assert mean == pytest.approx(pm, rel=1e-12)
    assert var == pytest.approx(pv, rel=1e-9, abs=1e-12)


def test_variance_bound_path4(path4):
    ref = reference(path4)
    inp = VarianceBoundInputs(4, ref.r_bar, ref.r, 0.75, ref.Delta)
    assert inp.cap == ref.Delta == 3
    b = variance_bound_exact(inp)
    assert b == pytest.approx(float(PATH4_BOUND), rel=1e-12)
    _, exact_var = exact_matching_moments(DistanceOracle(path4))
    assert exact_var == pytest.approx(8 / 9)
    assert exact_var <= b


def test_variance_bound_refuses_uncertified(path4):
    ref = reference(path4)
    with pytest.raises(BoundNotCertified):
        variance_bound_exact(VarianceBoundInputs(4, ref.r_bar, ref.r, 0.5, ref.Delta))
    with pytest.raises(BoundNotCertified):
        variance_bound_exact(VarianceBoundInputs(3, 1.0, 1.0, 1.0, 1.0))


def test_variance_bound_discrete8():
    ref = reference(Discrete(8))
    for delta in (1 / 7, 0.5, 1.0, 3.0):
        b = variance_bound_exact(VarianceBoundInputs(8, ref.r_bar, ref.r, delta, ref.Delta))
        assert 0 <= b


@pytest.mark.parametrize("family", ["euclidean", "graph-gnp", "graph-tree", "matrix"])
def test_variance_bound_dominates_exact_variance(family):
    for seed in range(4):
        inst = generate(family, 8, seed)
        ref = reference(inst)
        _, var = exact_matching_moments(DistanceOracle(inst))
        # smallest admissible delta makes the bound tightest
        delta = ref.Delta / (8 * ref.r)
        b = variance_bound_exact(VarianceBoundInputs(8, ref.r_bar, ref.r, delta, ref.Delta))
        assert var <= b + 1e-9


def test_chebyshev_examples(oracle4):
    assert chebyshev_tail(0, 1, 1).bound == 1
    assert chebyshev_tail(0, 1, 3).bound == pytest.approx(1 / 9)
    with pytest.raises(ValueError):
        chebyshev_tail(0, 1, 0.5)
    tail = chebyshev_tail(10 / 3, 8 / 9, 3)
    values = draw_matching_sums(oracle4, 50_000, make_rng(3))
    assert tail.outside_fraction(values) <= tail.bound


def test_chebyshev_point_mass():
    tail = chebyshev_tail(5.0, 0.0, 2)
    assert tail.outside_fraction(np.full(10, 5.0)) == 0
    assert tail.outside(5.5)


def test_chebyshev_holds_on_skewed_instance():
    # odd n with one far point: the sum jumps when that point sits out
    m = np.ones((9, 9)) - np.eye(9)
    m[0, 1:] = m[1:, 0] = 1.9
    inst = ExplicitMatrix(m)
    mean, var = exact_matching_moments(DistanceOracle(inst))
    values = draw_matching_sums(DistanceOracle(inst), 20_000, make_rng(9))
    for k in (1.0, 1.5, 2.0, 3.0):
        tail = chebyshev_tail(mean, var, k)
        frac = tail.outside_fraction(values)
        assert frac <= tail.bound + 3 * math.sqrt(tail.bound * (1 - tail.bound) / len(values)) + 1e-12


@pytest.mark.parametrize("inst", small_instances(seed=1) + [two_point(5.0)], ids=repr)
def test_matching_sum_never_exceeds_cap(inst):
    ref = reference(inst)
    values = draw_matching_sums(DistanceOracle(inst), 2000, make_rng(0))
    assert values.max() <= ref.opt * (1 + 1e-12)
    assert ref.opt <= inst.n * ref.r_bar * (1 + 1e-12)


def test_stats_from_values():
    s = MatchingStats.from_values(np.array([2.0, 4.0, 4.0, 2.0]))
    assert s.mean == 3 and s.variance == pytest.approx(4 / 3)
    assert s.std_error == pytest.approx(math.sqrt(4 / 3 / 4))
    with pytest.raises(ValueError):
        MatchingStats.from_values([1.0])

import numpy as np
import pytest

from metricmatch import DistanceOracle, make_rng, validate_metric
from metricmatch.adversary import (
    Refusal,
    SelfQuery,
    VerificationFailure,
    brute_force_algorithm,
    construct_fooling_metric,
    query_nothing,
    query_threshold,
    random_k_queries,
    record_run,
    truncated_las_vegas,
    verify_fooling,
)


def test_query_nothing_transcript():
    t = record_run(query_nothing, 100, make_rng(0))
    assert len(t.pairs) == 99 and t.output_p == 1 and t.raw_queries == 0
    assert all(v == 1.0 for v in t.answers.values())


def test_query_nothing_fooling_values():
    t = record_run(query_nothing, 100, make_rng(0))
    assert query_threshold(100, 0.5) == 612.5625
    fr = construct_fooling_metric(t, 0.5)
    assert fr.p_hat == 2 and fr.involvement_of_p_hat == 1
    assert fr.cost_p == 99 and fr.cost_p_hat == 50
    assert fr.achieved_ratio == 99 / 50 == 1.98
    assert fr.cost_p_hat < (0.5 + 0.5 / 8) * 99 == 55.6875
    report = verify_fooling(fr, t, 0.5)
    assert report.ok and len(report.checks) == 6


def test_brute_force_is_refused():
    t = record_run(brute_force_algorithm, 10, make_rng(0))
    assert len(t.pairs) == 45
    r = construct_fooling_metric(t, 0.5)
    assert isinstance(r, Refusal) and r.reason == "budget_met"
    assert r.threshold == 0.5 * 81 / 8


def test_self_query_rejected():
    def bad(oracle, rng):
        oracle.dist(3, 3)
        return 1

    with pytest.raises(SelfQuery):
        record_run(bad, 10, make_rng(0))


def test_tampered_metric_fails_consistency():
    t = record_run(random_k_queries(50), 100, make_rng(1))
    fr = construct_fooling_metric(t, 0.5)
    a, b = next(iter(t.pairs))
    fr.metric = fr.metric.copy()
    fr.metric[a - 1, b - 1] = fr.metric[b - 1, a - 1] = 0.5
    report = verify_fooling(fr, t, 0.5, raise_on_failure=False)
    assert not report.checks["consistent"]
    with pytest.raises(VerificationFailure, match="consistent"):
        verify_fooling(fr, t, 0.5)


@pytest.mark.parametrize("eps", [0.1, 0.5, 0.9, 0.999])
def test_ratio_beats_two_minus_eps(eps):
    n = 2 * int(np.ceil(8 / eps)) + 1
    t = record_run(query_nothing, n, make_rng(0))
    fr = construct_fooling_metric(t, eps)
    assert not isinstance(fr, Refusal)
    assert fr.achieved_ratio > 2 - eps
    assert verify_fooling(fr, t, eps).ok


@pytest.mark.parametrize(
    "algo", [query_nothing, random_k_queries(0), random_k_queries(200), random_k_queries(500),
             truncated_las_vegas(300), truncated_las_vegas(500)],
    ids=lambda a: a.__name__,
)
def test_stub_corpus_under_budget(algo):
    for seed in range(10):
        t = record_run(algo, 100, make_rng(seed))
        fr = construct_fooling_metric(t, 0.5)
        if isinstance(fr, Refusal):
            assert len(t.pairs) >= query_threshold(100, 0.5)
            continue
        assert verify_fooling(fr, t, 0.5).ok
        assert validate_metric(fr.metric, rel_tol=0.0) is None
        # p_hat can only be beaten by itself on the fooling metric
        assert fr.achieved_ratio == pytest.approx(fr.cost_p / fr.cost_p_hat)


def test_truncated_las_vegas_stays_under_cap():
    oracle_n = 100
    t = record_run(truncated_las_vegas(400), oracle_n, make_rng(3))
    assert t.raw_queries <= 400

"""Random-matching estimators over finite metric spaces.

Las Vegas 1-median selection, sublinear average-distance estimation, the
matching-sum variance bound, and a lower-bound adversary, all checked
against brute-force references.
"""
from .metrics import (
    Discrete,
    DistanceOracle,
    EuclideanPoints,
    ExplicitMatrix,
    Graph,
    MetricError,
    QueryLedger,
    Violation,
    brute_force_median,
    diameter,
    dist,
    exact_average_distance,
    exact_sum_cost,
    graph_distances_from,
    reference,
    validate_metric,
)
from .matching import (
    MatchingStats,
    MatchingSum,
    VarianceBoundInputs,
    chebyshev_tail,
    empirical_matching_stats,
    expected_matching_sum,
    knuth_shuffle,
    make_rng,
    matching_sum,
    variance_bound_exact,
)
from .median import MedianResult, approx_median_stand_in, las_vegas_median, success_probability_probe
from .avgdist import (
    AvgDistanceEstimate,
    estimate_avg_general,
    estimate_avg_graph,
    graph_diagnostics,
    pair_sampling_baseline,
)
from .maxsquare import MaxSquareSumInstance, analytic_bound, greedy_optimum, random_feasible
from .adversary import construct_fooling_metric, record_run, verify_fooling

__version__ = "0.1.0"

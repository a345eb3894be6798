"""cascnet: design, evaluate, and optimize cascade-resilient network topologies."""

from .cascade import (
    EXACT_EDGE_CAP,
    MAX_REPLICATIONS,
    MIN_REPLICATIONS,
    CascadeParams,
    MetricEstimate,
    edge_transmission_prob,
    estimate_expected_extent,
    expected_extent_exact,
    simulate_cascade,
)
from .designs import (
    ALL_DESIGNS,
    DesignConfig,
    analytic_cycles,
    analytic_stars,
    generate,
    generate_ensemble,
    stars_single_cell_threshold,
)
from .graphs import (
    EdgeWeights,
    Graph,
    build_graph,
    connected_components,
    harmonic_mean_weight,
    shortest_path_lengths,
    weighted_shortest_path_lengths,
)
from .io import (
    LabeledNetwork,
    analyze_network,
    emit_csv,
    emit_plot,
    map_hijacker_weights,
    map_multiplicity_weights,
    parse_edge_list,
)
from .metrics import FitnessParams, efficiency, fitness, resilience, weighted_efficiency
from .optimize import (
    CurvePoint,
    ParetoPoint,
    SensitivityReport,
    SurfacePoint,
    evaluate_configuration,
    evaluate_surfaces,
    fitness_curve,
    grid_search,
    pareto_frontier,
    sensitivity,
)
from .seeding import RunSeed

__version__ = "0.1.0"

__all__ = [
    "ALL_DESIGNS",
    "EXACT_EDGE_CAP",
    "MAX_REPLICATIONS",
    "MIN_REPLICATIONS",
    "CascadeParams",
    "CurvePoint",
    "DesignConfig",
    "EdgeWeights",
    "FitnessParams",
    "Graph",
    "LabeledNetwork",
    "MetricEstimate",
    "ParetoPoint",
    "RunSeed",
    "SensitivityReport",
    "SurfacePoint",
    "analytic_cycles",
    "analytic_stars",
    "analyze_network",
    "build_graph",
    "connected_components",
    "edge_transmission_prob",
    "efficiency",
    "emit_csv",
    "emit_plot",
    "estimate_expected_extent",
    "evaluate_configuration",
    "evaluate_surfaces",
    "expected_extent_exact",
    "fitness",
    "fitness_curve",
    "generate",
    "generate_ensemble",
    "grid_search",
    "harmonic_mean_weight",
    "map_hijacker_weights",
    "map_multiplicity_weights",
    "pareto_frontier",
    "parse_edge_list",
    "resilience",
    "sensitivity",
    "shortest_path_lengths",
    "simulate_cascade",
    "stars_single_cell_threshold",
    "weighted_efficiency",
    "weighted_shortest_path_lengths",
]

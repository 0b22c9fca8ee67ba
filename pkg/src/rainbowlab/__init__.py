"""Rainbow connectivity of random edge-colored graph families."""

from .engine import (
    ColorSet,
    Connectivity,
    SphereResult,
    bfs_diameter,
    is_rainbow_connected,
    rainbow_distance,
    rainbow_spheres,
)
from .exceptions import CapacityError, DomainError, GraphFormatError, RainbowError
from .graphs import (
    EdgeColoredGraph,
    GraphFamily,
    GraphLayer,
    Model,
    ModelParams,
    SeedPlan,
    derive_params,
    read_graph,
    sample,
    sample_family,
    sample_uniform,
    union_graph,
    write_graph,
)
from .harness import (
    DoublingCheck,
    ThresholdEstimate,
    TrialRecord,
    check_degree_lemma,
    check_doubling_lemma,
    compare_models,
    emit_results,
    estimate_probability,
    read_results,
    run_trial,
    scan_threshold,
    wilson_interval,
)
from .theory import (
    bounds_report,
    chung_lu_window,
    expected_rainbow_paths,
    lb_connect_s,
    s0_window,
    sweep_hint,
    ub_nonconnect_s,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ColorSet",
    "Connectivity",
    "DomainError",
    "DoublingCheck",
    "EdgeColoredGraph",
    "GraphFamily",
    "GraphFormatError",
    "GraphLayer",
    "Model",
    "ModelParams",
    "RainbowError",
    "SeedPlan",
    "SphereResult",
    "ThresholdEstimate",
    "TrialRecord",
    "bfs_diameter",
    "bounds_report",
    "check_degree_lemma",
    "check_doubling_lemma",
    "chung_lu_window",
    "compare_models",
    "derive_params",
    "emit_results",
    "estimate_probability",
    "expected_rainbow_paths",
    "is_rainbow_connected",
    "lb_connect_s",
    "rainbow_distance",
    "rainbow_spheres",
    "read_graph",
    "read_results",
    "run_trial",
    "s0_window",
    "sample",
    "sample_family",
    "sample_uniform",
    "scan_threshold",
    "sweep_hint",
    "ub_nonconnect_s",
    "union_graph",
    "wilson_interval",
    "write_graph",
]

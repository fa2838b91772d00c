"""Simulation and mean-field analysis of random unit-coefficient equation CSPs."""

try:
    from ._uecsp import *  # noqa: F401,F403  (installed layout: extension inside the package)
except ImportError:  # pragma: no cover - build-tree layout: extension beside the package
    from _uecsp import *  # noqa: F401,F403

__all__ = [
    "Formula",
    "check_solution",
    "gaussian_solve",
    "leaf_remove",
    "run_search",
    "estimate_success_probability",
    "integrate_trajectory",
    "clustering_threshold",
    "sat_threshold",
    "critical_point",
    "transition_lines",
    "classify",
    "guc_threshold_sweep",
]

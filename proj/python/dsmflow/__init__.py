"""Solver for ill-posed monotone operator equations via a regularized flow
with a discrepancy-principle stopping rule."""

try:
    from ._dsmflow import (
        gronwall_bound,
        registry_labels,
        run_study_config,
        sample_path,
        schedule_value,
        solve,
        validate_schedule,
    )
except ImportError:  # in-tree use: extension module next to the build dir
    from _dsmflow import (
        gronwall_bound,
        registry_labels,
        run_study_config,
        sample_path,
        schedule_value,
        solve,
        validate_schedule,
    )

__all__ = [
    "gronwall_bound",
    "registry_labels",
    "run_study_config",
    "sample_path",
    "schedule_value",
    "solve",
    "validate_schedule",
]

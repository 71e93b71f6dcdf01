"""Additive approximation for load balancing with per-machine target intervals."""

from .applications import (
    Calibration, calibrate, greedy_list_schedule, solve_envy, solve_makespan, solve_santa, solve_target,
)
from .instance import Instance, InstanceError, JobClasses, Objective, TargetInterval, classify_jobs, validate_instance

__all__ = [
    "Calibration",
    "Instance",
    "InstanceError",
    "JobClasses",
    "Objective",
    "TargetInterval",
    "calibrate",
    "classify_jobs",
    "greedy_list_schedule",
    "solve_envy",
    "solve_makespan",
    "solve_santa",
    "solve_target",
    "validate_instance",
]

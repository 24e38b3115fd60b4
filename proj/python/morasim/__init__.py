"""Exact discrete-event simulator for slack-reclaiming DVFS on global multiprocessor schedules."""

from ._core import (
    DeadlineMissError,
    Error,
    InvariantViolationError,
    JobRelease,
    ProcessorModel,
    SpeedLevel,
    Task,
    density_test,
    energy,
    generate_actual_times,
    generate_taskset,
    hyperperiod,
    load_actual_times,
    load_taskset,
    min_processors,
    parse_taskset,
    quantize_speed,
    simulate,
    size_platform,
    taskset_to_json,
    wcet_releases,
)

__all__ = [
    "DeadlineMissError",
    "Error",
    "InvariantViolationError",
    "JobRelease",
    "ProcessorModel",
    "SpeedLevel",
    "Task",
    "density_test",
    "energy",
    "generate_actual_times",
    "generate_taskset",
    "hyperperiod",
    "load_actual_times",
    "load_taskset",
    "min_processors",
    "parse_taskset",
    "quantize_speed",
    "simulate",
    "size_platform",
    "taskset_to_json",
    "wcet_releases",
]

"""Experiments, acceptance battery and command line."""

from .experiments import (
    THRESHOLDS,
    distance_samples,
    run_asymptotics,
    run_bs_census,
    run_constants,
    run_counting,
    run_diameter_tail,
    run_fragments,
    run_rayleigh,
    run_uniformity,
)
from .report import ExperimentReport
from .verify import run_verify

__all__ = [
    "THRESHOLDS",
    "ExperimentReport",
    "distance_samples",
    "run_asymptotics",
    "run_bs_census",
    "run_constants",
    "run_counting",
    "run_diameter_tail",
    "run_fragments",
    "run_rayleigh",
    "run_uniformity",
    "run_verify",
]

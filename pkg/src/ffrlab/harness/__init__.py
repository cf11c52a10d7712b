"""Experiment orchestration: configs, samplers, suites, reports, CLI."""

from ffrlab.harness.config import ExperimentConfig, suite_config
from ffrlab.harness.reporting import ConstantFit, VerificationReport, constant_fit
from ffrlab.harness.suites import SUITES, run_suite

__all__ = [
    "ExperimentConfig",
    "suite_config",
    "ConstantFit",
    "VerificationReport",
    "constant_fit",
    "SUITES",
    "run_suite",
]

"""Evaluation harness: scenario matrices, sweeps, and reports."""

from .confusion import clean_enroll_eval, confusion_study
from .matrix import METRICS, ScenarioMatrix, compute_metric, run_matrix
from .models_api import (
    AntiOracleModel,
    BundleModel,
    IdentityModel,
    OracleModel,
    bundle_hash,
)
from .report import EvalReport, EvalRow, aggregate_row, canonical_hash, plot_rows
from .stats import two_sample_t_interval
from .sweeps import (
    label_noise_eval,
    sweep_enroll_length,
    sweep_enroll_snr,
    sweep_ni_length,
    sweep_pi_length,
)

__all__ = [
    "AntiOracleModel",
    "BundleModel",
    "EvalReport",
    "EvalRow",
    "IdentityModel",
    "METRICS",
    "OracleModel",
    "ScenarioMatrix",
    "aggregate_row",
    "bundle_hash",
    "canonical_hash",
    "clean_enroll_eval",
    "compute_metric",
    "confusion_study",
    "label_noise_eval",
    "plot_rows",
    "run_matrix",
    "sweep_enroll_length",
    "sweep_enroll_snr",
    "sweep_ni_length",
    "sweep_pi_length",
    "two_sample_t_interval",
]

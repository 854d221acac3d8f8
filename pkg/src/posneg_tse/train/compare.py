"""Convergence comparison between training runs."""

from __future__ import annotations

from .loop import TrainLog


def first_step_to_threshold(log: TrainLog, threshold_db: float) -> int | None:
    """Earliest step whose validation SNR reaches the threshold, else None."""
    for rec in log.epochs:
        if "val_snr_db" in rec and rec["val_snr_db"] >= threshold_db:
            return int(rec["step"])
    return None


def compare_convergence(log_a: TrainLog, log_b: TrainLog,
                        threshold_db: float) -> dict:
    """First-step-to-threshold for two validation-SNR-tracking logs."""
    a = first_step_to_threshold(log_a, threshold_db)
    b = first_step_to_threshold(log_b, threshold_db)
    return {
        "threshold_db": threshold_db,
        log_a.stage: a if a is not None else "never",
        log_b.stage: b if b is not None else "never",
    }

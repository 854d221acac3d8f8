"""Evaluation report container with deterministic serialization."""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class EvalRow:
    scenario: dict
    metric: str
    mean: float | None
    std: float | None        # sample estimator (ddof=1); None when n < 2
    n: int
    skipped: str | None = None
    n_failed: int = 0

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "metric": self.metric,
                "mean": self.mean, "std": self.std, "n": self.n,
                "skipped": self.skipped, "n_failed": self.n_failed}


@dataclass
class EvalReport:
    rows: list[EvalRow]
    manifest: dict
    model_id: str

    @property
    def manifest_hash(self) -> str:
        return canonical_hash(self.manifest)

    def to_dict(self) -> dict:
        return {
            "manifest": self.manifest,
            "manifest_hash": self.manifest_hash,
            "model_id": self.model_id,
            "rows": [r.to_dict() for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    def save_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["scenario", "metric", "mean", "std", "n",
                             "skipped", "n_failed"])
            for r in self.rows:
                writer.writerow([json.dumps(r.scenario, sort_keys=True), r.metric,
                                 r.mean, r.std, r.n, r.skipped or "", r.n_failed])

    def select(self, metric: str) -> list[EvalRow]:
        return [r for r in self.rows if r.metric == metric]


def canonical_hash(obj: dict) -> str:
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def aggregate_row(scenario: dict, metric: str, values: list[float],
                  n_failed: int = 0) -> EvalRow:
    n = len(values)
    if n == 0:
        return EvalRow(scenario, metric, None, None, 0,
                       skipped="no successful samples", n_failed=n_failed)
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if n > 1 else None
    return EvalRow(scenario, metric, mean, std, n, n_failed=n_failed)


def plot_rows(report: EvalReport, metric: str, x_key: str,
              path: str | Path) -> None:
    """Minimal static chart export of one metric against a scenario axis."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = [r for r in report.select(metric) if r.mean is not None
            and x_key in r.scenario]
    rows.sort(key=lambda r: r.scenario[x_key])
    xs = [r.scenario[x_key] for r in rows]
    ys = [r.mean for r in rows]
    errs = [(r.std or 0.0) for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.errorbar(xs, ys, yerr=errs, marker="o", capsize=3)
    ax.set_xlabel(x_key)
    ax.set_ylabel(metric)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)

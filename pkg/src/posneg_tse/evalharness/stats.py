"""Report post-processing: two-sample t-interval helper."""

from __future__ import annotations

import math

from scipy import stats


def two_sample_t_interval(mean_a: float, std_a: float, n_a: int,
                          mean_b: float, std_b: float, n_b: int,
                          confidence: float = 0.90) -> dict:
    """Welch confidence interval for mean_a - mean_b from summary stats."""
    if min(n_a, n_b) < 2:
        raise ValueError("need at least two samples per group")
    va, vb = std_a ** 2 / n_a, std_b ** 2 / n_b
    se = math.sqrt(va + vb)
    dof = (va + vb) ** 2 / (va ** 2 / (n_a - 1) + vb ** 2 / (n_b - 1))
    tcrit = stats.t.ppf(0.5 + confidence / 2, dof)
    diff = mean_a - mean_b
    lo, hi = diff - tcrit * se, diff + tcrit * se
    return {
        "diff": diff,
        "ci_low": lo,
        "ci_high": hi,
        "confidence": confidence,
        "dof": dof,
        "significant": bool(lo > 0 or hi < 0),
    }

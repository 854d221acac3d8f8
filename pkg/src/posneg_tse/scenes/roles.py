"""Interferer role taxonomy and role-assignment policies."""

from __future__ import annotations

from enum import Enum

import numpy as np


class SpeakerRole(str, Enum):
    TARGET = "TARGET"
    PI = "PI"        # speaks in part of the positive enrollment only
    NI = "NI"        # spans the positive enrollment, present in the negative
    HI = "HI"        # partial presence in both enrollments
    NRI = "NRI"      # present only in the negative enrollment


# Policies: "training" draws PI/NI uniformly (the composition used for
# on-the-fly training data); the "all-*" policies emit a fixed composition
# for the per-role evaluation sweeps.
_FIXED_POLICIES = {
    "all-pi": SpeakerRole.PI,
    "all-ni": SpeakerRole.NI,
    "all-hi": SpeakerRole.HI,
    "all-nri": SpeakerRole.NRI,
}


def assign_roles(n_interferers: int, policy: str,
                 rng: np.random.Generator) -> list[SpeakerRole]:
    """Assign a role to each of ``n_interferers`` enrollment interferers."""
    if n_interferers < 0:
        raise ValueError("n_interferers must be >= 0")
    if policy == "training":
        picks = rng.integers(0, 2, size=n_interferers)
        return [SpeakerRole.PI if p == 0 else SpeakerRole.NI for p in picks]
    if policy == "pi-ni":
        # one PI then one NI then alternating; the Fig. 4/5 sweep family
        return [SpeakerRole.PI if i % 2 == 0 else SpeakerRole.NI
                for i in range(n_interferers)]
    if policy in _FIXED_POLICIES:
        return [_FIXED_POLICIES[policy]] * n_interferers
    raise ValueError(f"unknown role policy {policy!r}")

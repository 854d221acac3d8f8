"""Seeded on-the-fly scene streams for training and evaluation.

A stream is stateless: scene i is a pure function of (policy, base seed, i),
so training can resume mid-run and validation sets are reproducible by
picking a disjoint seed namespace.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .corpus import Corpus
from .roles import SpeakerRole, assign_roles
from .scene import Scene, SceneSpec, realize_scene


@dataclass(frozen=True)
class ScenePolicy:
    """Knobs of a scene family."""

    pos_len_s: float = 3.0
    neg_len_s: float = 3.0
    mix_len_s: float = 6.0
    n_enroll_interferers: int = 2
    n_mixture_interferers: int = 2
    role_policy: str = "training"
    share_interferers: bool = False  # mixture reuses the enrollment interferers
    pi_len_s: float | None = None
    ni_len_s: float | None = None
    noise_snr_lo_db: float = -2.5
    noise_snr_hi_db: float = 2.5


def spec_at(policy: ScenePolicy, corpus: Corpus, base_seed: int, index: int) -> SceneSpec:
    """The index-th SceneSpec of the stream (deterministic, stateless)."""
    rng = np.random.default_rng([base_seed, index])
    speakers = corpus.speaker_ids
    n_extra = policy.n_enroll_interferers + (
        0 if policy.share_interferers else policy.n_mixture_interferers)
    picked = rng.choice(len(speakers), size=1 + n_extra, replace=False)
    target = speakers[picked[0]]
    enroll_ids = [speakers[i] for i in picked[1:1 + policy.n_enroll_interferers]]
    if policy.share_interferers:
        mixture_ids = list(enroll_ids[:policy.n_mixture_interferers])
    else:
        mixture_ids = [speakers[i] for i in picked[1 + policy.n_enroll_interferers:]]
    roles = assign_roles(policy.n_enroll_interferers, policy.role_policy, rng)
    return SceneSpec(
        target_id=target,
        enroll_interferers=list(zip(enroll_ids, roles)),
        mixture_interferers=mixture_ids,
        pos_len_s=policy.pos_len_s,
        neg_len_s=policy.neg_len_s,
        mix_len_s=policy.mix_len_s,
        pi_len_s=policy.pi_len_s,
        ni_len_s=policy.ni_len_s,
        noise_clip_id=corpus.noise_ids[int(rng.integers(0, len(corpus.noise_ids)))],
        noise_snr_db=float(rng.uniform(policy.noise_snr_lo_db, policy.noise_snr_hi_db)),
        seed=int(rng.integers(0, 2 ** 31 - 1)),
    )


@dataclass
class SceneStream:
    policy: ScenePolicy
    corpus: Corpus
    base_seed: int

    def spec(self, index: int) -> SceneSpec:
        return spec_at(self.policy, self.corpus, self.base_seed, index)

    def scene(self, index: int) -> Scene:
        return realize_scene(self.spec(index), self.corpus)


def disambiguation_policy(pos_len_s: float = 3.0, neg_len_s: float = 3.0,
                          mix_len_s: float = 3.0,
                          pi_len_s: float | None = None,
                          ni_len_s: float | None = None) -> ScenePolicy:
    """The Fig. 4/5 scene family: one PI + one NI, mixture shares them."""
    return ScenePolicy(
        pos_len_s=pos_len_s, neg_len_s=neg_len_s, mix_len_s=mix_len_s,
        n_enroll_interferers=2, n_mixture_interferers=2,
        role_policy="pi-ni", share_interferers=True,
        pi_len_s=pi_len_s, ni_len_s=ni_len_s,
    )

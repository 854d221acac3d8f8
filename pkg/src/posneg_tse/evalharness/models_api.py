"""Model adapters the harness evaluates: reference models and bundles."""

from __future__ import annotations

import hashlib

import numpy as np

from ..audio import Waveform
from ..models import (
    EmbeddingSequence,
    ModelBundle,
    Origin,
    condition_from_enrollments,
    encode_enrollment,
    encoder_fusion,
    extract,
)
from ..scenes import Scene


class IdentityModel:
    """Returns the mixture unchanged: every improvement metric is zero."""

    model_id = "identity"

    def extract_scene(self, scene: Scene) -> Waveform:
        return scene.mixture

    def embed_pair(self, pos: Waveform, neg: Waveform) -> EmbeddingSequence:
        return EmbeddingSequence(np.ones((1, 1), dtype=np.float32), Origin.FUSED)


class OracleModel:
    """Returns the ground-truth target stem: improvements hit the cap."""

    model_id = "oracle"

    def extract_scene(self, scene: Scene) -> Waveform:
        return scene.ground_truth

    def embed_pair(self, pos: Waveform, neg: Waveform) -> EmbeddingSequence:
        return EmbeddingSequence(np.ones((1, 1), dtype=np.float32), Origin.FUSED)


class AntiOracleModel:
    """Returns the first interferer's stem: the worst-case confusion probe."""

    model_id = "anti-oracle"

    def extract_scene(self, scene: Scene) -> Waveform:
        interferer = scene.spec.mixture_interferers[0]
        return scene.stems["mixture"][interferer]

    def embed_pair(self, pos: Waveform, neg: Waveform) -> EmbeddingSequence:
        return EmbeddingSequence(np.ones((1, 1), dtype=np.float32), Origin.FUSED)


class BundleModel:
    """A trained bundle driven through the full conditioning pipeline."""

    def __init__(self, bundle: ModelBundle, model_id: str | None = None):
        self.bundle = bundle
        self.model_id = model_id or bundle_hash(bundle)[:12]

    def extract_scene(self, scene: Scene) -> Waveform:
        cond = condition_from_enrollments(scene.positive, scene.negative, self.bundle)
        return extract(scene.mixture, cond, self.bundle)

    def embed_pair(self, pos: Waveform, neg: Waveform) -> EmbeddingSequence:
        e_pos = encode_enrollment(pos, self.bundle, Origin.POS)
        e_neg = encode_enrollment(neg, self.bundle, Origin.NEG)
        return encoder_fusion(e_pos, e_neg, self.bundle)


def bundle_hash(bundle: ModelBundle) -> str:
    """Stable identity of a bundle's hyperparameters and parameters."""
    h = hashlib.sha256()
    h.update(repr(sorted(bundle.hp.to_dict().items())).encode())
    arrays = bundle.state_arrays()
    for key in sorted(arrays):
        h.update(key.encode())
        h.update(arrays[key].tobytes())
    return h.hexdigest()

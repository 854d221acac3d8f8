"""Scene simulation: role taxonomy, corpora, and deterministic realization."""

from .corpus import Corpus, build_synthetic_corpus, fixed_noise_clip, synth_noise, synth_voice
from .roles import SpeakerRole, assign_roles
from .scene import (
    BinauralSpec,
    Scene,
    SceneSpec,
    iou_assumption_report,
    prepare_utterance,
    realize_scene,
    sample_noise_segments,
    scene_to_dir,
)
from .stream import ScenePolicy, SceneStream, disambiguation_policy, spec_at

__all__ = [
    "BinauralSpec",
    "Corpus",
    "Scene",
    "ScenePolicy",
    "SceneSpec",
    "SceneStream",
    "SpeakerRole",
    "assign_roles",
    "build_synthetic_corpus",
    "disambiguation_policy",
    "fixed_noise_clip",
    "iou_assumption_report",
    "prepare_utterance",
    "realize_scene",
    "sample_noise_segments",
    "scene_to_dir",
    "spec_at",
    "synth_noise",
    "synth_voice",
]

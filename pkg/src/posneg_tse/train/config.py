"""Training configuration and the toy/paper scale profiles."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..models import Hyperparams, paper_hyperparams, toy_hyperparams
from ..scenes import ScenePolicy

DEFAULT_LR_MAP = {"siamese": 5e-4, "fusion": 1e-3, "extraction": 2e-3}


@dataclass
class TrainConfig:
    stage: str                              # teacher | stage1 | stage2 | end2end
    corpus_root: str = ""
    profile: str = "toy"                    # toy | paper
    lr_map: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_LR_MAP))
    plateau_patience_epochs: int = 50
    lr_decay: float = 0.5
    batch_size: int = 2
    max_steps: int = 2000
    seed: int = 0
    scenes_per_epoch: int = 50
    val_scenes: int = 16
    grad_clip_norm: float = 5.0
    freeze_encoder_stage2: bool = True      # unfreeze via config if desired
    overfit_single_scene: bool = False      # every step replays scene 0
    early_stop_train_loss: float | None = None    # stop once loss <= value
    early_stop_loss_factor: float | None = None   # stop once loss <= first/factor
    scene_policy: ScenePolicy = field(default_factory=ScenePolicy)

    def __post_init__(self):
        if self.stage not in ("teacher", "stage1", "stage2", "end2end"):
            raise ValueError(f"unknown stage {self.stage!r}")
        if self.plateau_patience_epochs <= 0:
            raise ValueError("patience must be positive")
        if set(self.lr_map) != {"siamese", "fusion", "extraction"}:
            raise ValueError("lr_map must key siamese/fusion/extraction")

    def hyperparams(self, **overrides) -> Hyperparams:
        if self.profile == "toy":
            return toy_hyperparams(**overrides)
        if self.profile == "paper":
            return paper_hyperparams(**overrides)
        raise ValueError(f"unknown profile {self.profile!r}")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["scene_policy"] = dataclasses.asdict(self.scene_policy)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        if isinstance(d.get("scene_policy"), dict):
            d["scene_policy"] = ScenePolicy(**d["scene_policy"])
        return cls(**d)

    @classmethod
    def from_manifest(cls, path: str | Path) -> "TrainConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def toy_scene_policy(**overrides) -> ScenePolicy:
    """Short segments keep the recurrent sweeps cheap on CPU."""
    base = dict(pos_len_s=0.5, neg_len_s=0.5, mix_len_s=0.5,
                n_enroll_interferers=2, n_mixture_interferers=2,
                role_policy="training")
    base.update(overrides)
    return ScenePolicy(**base)


def paper_scene_policy(**overrides) -> ScenePolicy:
    base = dict(pos_len_s=3.0, neg_len_s=3.0, mix_len_s=6.0,
                n_enroll_interferers=2, n_mixture_interferers=2,
                role_policy="training")
    base.update(overrides)
    return ScenePolicy(**base)

"""Two-stage optimization pipeline and the end-to-end baseline."""

from .compare import compare_convergence, first_step_to_threshold
from .config import DEFAULT_LR_MAP, TrainConfig, paper_scene_policy, toy_scene_policy
from .loop import (
    PlateauHalver,
    TrainLog,
    TrainingDiverged,
    StageRunner,
    scene_tensors,
    train_end2end,
    train_stage1,
    train_stage2,
    train_teacher,
)
from .losses import embedding_distill_loss, negative_snr_loss, snr_db_t

__all__ = [
    "DEFAULT_LR_MAP",
    "PlateauHalver",
    "StageRunner",
    "TrainConfig",
    "TrainLog",
    "TrainingDiverged",
    "compare_convergence",
    "embedding_distill_loss",
    "first_step_to_threshold",
    "negative_snr_loss",
    "paper_scene_policy",
    "scene_tensors",
    "snr_db_t",
    "toy_scene_policy",
    "train_end2end",
    "train_stage1",
    "train_stage2",
    "train_teacher",
]

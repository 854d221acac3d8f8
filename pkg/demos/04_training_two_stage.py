"""Two-stage training in miniature, against the end-to-end baseline.

Run:  python demos/04_training_two_stage.py          (~10 min on one core)
Budgets here are demonstration-sized; tests/test_acceptance.py runs the
full calibrated schedule.
"""

import json
from pathlib import Path

import torch

from posneg_tse.scenes import Corpus, build_synthetic_corpus
from posneg_tse.train import (
    TrainConfig,
    compare_convergence,
    first_step_to_threshold,
    toy_scene_policy,
    train_end2end,
    train_stage1,
    train_stage2,
    train_teacher,
)

torch.set_num_threads(1)
out = Path(__file__).parent / "output"
corpus_dir = out / "corpus"
if not (corpus_dir / "index.json").exists():
    build_synthetic_corpus(corpus_dir)
corpus = Corpus(corpus_dir)

STEPS = 400
base = dict(profile="toy", batch_size=2, scenes_per_epoch=50, val_scenes=8,
            max_steps=STEPS, seed=11, scene_policy=toy_scene_policy())

print(f"teacher bootstrap ({STEPS} steps) ...")
teacher, teacher_log = train_teacher(TrainConfig(stage="teacher", **base), corpus)
print("  val SNR:", teacher_log.epochs[-1].get("val_snr_db") if teacher_log.epochs else "n/a")

print(f"stage 1: distill the teacher's clean embedding ({STEPS} steps) ...")
student, s1_log = train_stage1(TrainConfig(stage="stage1", **base), teacher, corpus)
print("  val loss:", s1_log.epochs[-1]["val_loss"] if s1_log.epochs else "n/a")

print(f"stage 2: extraction against the frozen encoder ({STEPS} steps) ...")
bundle, s2_log = train_stage2(TrainConfig(stage="stage2", **base), student, corpus)
print("  val SNR:", s2_log.epochs[-1].get("val_snr_db") if s2_log.epochs else "n/a")

print(f"end-to-end baseline ({STEPS} steps, matched seed) ...")
e2e, e2e_log = train_end2end(TrainConfig(stage="end2end", **base), corpus)
print("  val SNR:", e2e_log.epochs[-1].get("val_snr_db") if e2e_log.epochs else "n/a")

threshold = 3.0
comparison = {
    "threshold_db": threshold,
    "stage2_first_step": first_step_to_threshold(s2_log, threshold),
    "end2end_first_step": first_step_to_threshold(e2e_log, threshold),
    "stage1_steps_spent": len(s1_log.steps),
    "note": "two-stage total cost = stage1 steps + stage2 first step",
    "pairwise": compare_convergence(s2_log, e2e_log, threshold),
}
out.mkdir(exist_ok=True)
(out / "convergence_comparison.json").write_text(json.dumps(comparison, indent=1))
print(json.dumps(comparison, indent=1))

bundle.save(out / "two_stage_demo.ckpt")
print(f"checkpoint -> {out / 'two_stage_demo.ckpt'}")

"""Two-stage training pipeline, end-to-end baseline, and teacher bootstrap.

Stages
------
teacher   encoder + extraction trained jointly on *clean* enrollments
          (the target's clean positive-segment speech stands in for the
          enrollment pair); the resulting encoder is frozen and provides
          the distillation reference.
stage1    Siamese encoder + fusion trained to match the teacher's clean
          embedding (mean squared error).
stage2    extraction branch trained with the negative-SNR loss, encoder
          and fusion frozen (configurable).
end2end   everything trained jointly with the negative-SNR loss.

Scene streams are stateless functions of (policy, seed, index), so a run
can resume from a checkpoint and replay bit-identically.
"""

from __future__ import annotations

import copy
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..models import ModelBundle, pool_time
from ..scenes import Corpus, Scene, SceneStream
from .config import TrainConfig
from .losses import embedding_distill_loss, negative_snr_loss, snr_db_t

VAL_SEED_OFFSET = 7919  # validation stream namespace, disjoint from training


class TrainingDiverged(RuntimeError):
    """Loss went non-finite; carries the last good bundle when available."""

    def __init__(self, message: str, bundle: ModelBundle | None = None):
        super().__init__(message)
        self.bundle = bundle


@dataclass
class TrainLog:
    stage: str
    records: list[dict] = field(default_factory=list)
    wall_s: float = 0.0

    def append(self, record: dict) -> None:
        if self.records:
            prev = self.records[-1].get("step", -1)
            if record.get("step", prev) < prev:
                raise ValueError("step index must be monotone")
        self.records.append(record)

    @property
    def steps(self) -> list[dict]:
        return [r for r in self.records if r["kind"] == "step"]

    @property
    def epochs(self) -> list[dict]:
        return [r for r in self.records if r["kind"] == "epoch"]

    def save(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            fh.write(json.dumps({"kind": "meta", "stage": self.stage,
                                 "wall_s": self.wall_s}) + "\n")
            for rec in self.records:
                fh.write(json.dumps(rec) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "TrainLog":
        records = [json.loads(line) for line in Path(path).read_text().splitlines()]
        meta = records[0]
        log = cls(stage=meta["stage"], wall_s=meta.get("wall_s", 0.0))
        log.records = records[1:]
        return log


class PlateauHalver:
    """Halve every group's lr after `patience` consecutive non-improving
    validations; the lr never increases."""

    def __init__(self, optimizer: torch.optim.Optimizer, patience: int,
                 decay: float = 0.5):
        self.optimizer = optimizer
        self.patience = patience
        self.decay = decay
        self.best = float("inf")
        self.bad_epochs = 0

    def update(self, val_loss: float) -> bool:
        if val_loss < self.best:
            self.best = val_loss
            self.bad_epochs = 0
            return False
        self.bad_epochs += 1
        if self.bad_epochs >= self.patience:
            for group in self.optimizer.param_groups:
                group["lr"] *= self.decay
            self.bad_epochs = 0
            return True
        return False

    def state_dict(self) -> dict:
        return {"best": self.best, "bad_epochs": self.bad_epochs}

    def load_state_dict(self, d: dict) -> None:
        self.best = d["best"]
        self.bad_epochs = d["bad_epochs"]


def scene_tensors(scene: Scene) -> dict[str, torch.Tensor]:
    def t(w) -> torch.Tensor:
        return torch.from_numpy(w.samples.astype(np.float32))

    return {
        "pos": t(scene.positive),
        "neg": t(scene.negative),
        "mix": t(scene.mixture),
        "tgt": t(scene.ground_truth),
        "clean": t(scene.clean_target),
    }


def _stack(batch: list[dict[str, torch.Tensor]]) -> dict[str, torch.Tensor]:
    return {k: torch.stack([b[k] for b in batch]) for k in batch[0]}


def _set_trainable(module: torch.nn.Module, trainable: bool) -> None:
    for p in module.parameters():
        p.requires_grad_(trainable)


class StageRunner:
    """Shared engine: batching, validation, plateau schedule, logging."""

    def __init__(self, cfg: TrainConfig, corpus: Corpus, bundle: ModelBundle,
                 teacher: ModelBundle | None = None):
        self.cfg = cfg
        self.bundle = bundle
        self.teacher = teacher
        self.stream = SceneStream(cfg.scene_policy, corpus, cfg.seed)
        self.val_stream = SceneStream(cfg.scene_policy, corpus,
                                      cfg.seed + VAL_SEED_OFFSET)
        self.log = TrainLog(stage=cfg.stage)
        self.best_val = float("inf")
        self.best_state: dict[str, dict] | None = None
        self._val_cache: list[dict[str, torch.Tensor]] | None = None
        self._overfit_batch: dict[str, torch.Tensor] | None = None

        trainable = {
            "teacher": ("encoder", "extraction"),
            "stage1": ("encoder", "fusion"),
            "stage2": ("extraction",) + (() if cfg.freeze_encoder_stage2
                                         else ("encoder", "fusion")),
            "end2end": ("encoder", "fusion", "extraction"),
        }[cfg.stage]
        lr_of = {"encoder": cfg.lr_map["siamese"], "fusion": cfg.lr_map["fusion"],
                 "extraction": cfg.lr_map["extraction"]}
        groups = []
        for name, module in bundle.modules_by_name().items():
            _set_trainable(module, name in trainable)
            module.train(name in trainable)
            groups.append({"params": list(module.parameters()), "lr": lr_of[name],
                           "name": name})
        self.optimizer = torch.optim.Adam(groups)
        self.scheduler = PlateauHalver(self.optimizer, cfg.plateau_patience_epochs,
                                       cfg.lr_decay)
        if teacher is not None:
            for m in teacher.modules_by_name().values():
                m.eval()
                _set_trainable(m, False)
            if teacher.hp.embed_dim != bundle.hp.embed_dim:
                raise ValueError("teacher/student embedding dimension mismatch")

    # --- data ---------------------------------------------------------------

    def _train_batch(self, step: int) -> dict[str, torch.Tensor]:
        if self.cfg.overfit_single_scene:
            if self._overfit_batch is None:
                self._overfit_batch = _stack([scene_tensors(self.stream.scene(0))])
            return self._overfit_batch
        b = self.cfg.batch_size
        scenes = [self.stream.scene(step * b + j) for j in range(b)]
        return _stack([scene_tensors(s) for s in scenes])

    def _val_batches(self) -> list[dict[str, torch.Tensor]]:
        if self._val_cache is None:
            if self.cfg.overfit_single_scene:
                scenes = [self.stream.scene(0)]
            else:
                scenes = [self.val_stream.scene(i) for i in range(self.cfg.val_scenes)]
            self._val_cache = [_stack([scene_tensors(s)]) for s in scenes]
        return self._val_cache

    # --- forward paths --------------------------------------------------------

    def _siamese_embed(self, pos: torch.Tensor, neg: torch.Tensor):
        if pos.shape == neg.shape:  # one call through the shared weights
            both = self.bundle.encoder(torch.cat([pos, neg], dim=0))
            return both[:pos.shape[0]], both[pos.shape[0]:]
        return self.bundle.encoder(pos), self.bundle.encoder(neg)

    def _condition(self, batch: dict[str, torch.Tensor],
                   grad: bool) -> torch.Tensor:
        def compute() -> torch.Tensor:
            e_pos, e_neg = self._siamese_embed(batch["pos"], batch["neg"])
            fused = self.bundle.fusion(e_pos, e_neg)
            return pool_time(fused, self.bundle.hp.pool_k)

        if grad:
            return compute()
        with torch.no_grad():
            return compute()

    def loss(self, batch: dict[str, torch.Tensor]) -> torch.Tensor:
        cfg = self.cfg
        if cfg.stage == "teacher":
            emb = self.bundle.encoder(batch["clean"])
            cond = pool_time(emb, self.bundle.hp.pool_k)
            est = self.bundle.extraction(batch["mix"], cond)
            return negative_snr_loss(est, batch["tgt"])
        if cfg.stage == "stage1":
            with torch.no_grad():
                e_clean = self.teacher.encoder(batch["clean"])
            e_pos, e_neg = self._siamese_embed(batch["pos"], batch["neg"])
            e_fused = self.bundle.fusion(e_pos, e_neg)
            return embedding_distill_loss(e_clean, e_fused)
        if cfg.stage == "stage2":
            cond = self._condition(batch, grad=not cfg.freeze_encoder_stage2)
            est = self.bundle.extraction(batch["mix"], cond)
            return negative_snr_loss(est, batch["tgt"])
        # end2end
        cond = self._condition(batch, grad=True)
        est = self.bundle.extraction(batch["mix"], cond)
        return negative_snr_loss(est, batch["tgt"])

    def validate(self) -> dict[str, float]:
        with torch.no_grad():
            if self.cfg.stage == "stage1":
                losses = [float(self.loss(b)) for b in self._val_batches()]
                return {"val_loss": float(np.mean(losses))}
            snrs = []
            for b in self._val_batches():
                if self.cfg.stage == "teacher":
                    cond = pool_time(self.bundle.encoder(b["clean"]),
                                     self.bundle.hp.pool_k)
                else:
                    cond = self._condition(b, grad=False)
                est = self.bundle.extraction(b["mix"], cond)
                snrs.append(float(snr_db_t(est, b["tgt"]).mean()))
            mean_snr = float(np.mean(snrs))
            return {"val_loss": -mean_snr, "val_snr_db": mean_snr}

    # --- main loop ------------------------------------------------------------

    def run(self, start_step: int = 0) -> TrainLog:
        cfg = self.cfg
        steps_per_epoch = max(1, cfg.scenes_per_epoch // cfg.batch_size)
        trainable_params = [p for g in self.optimizer.param_groups
                            for p in g["params"] if p.requires_grad]
        last_good = None
        first_loss = None
        t0 = time.time()
        for step in range(start_step, cfg.max_steps):
            batch = self._train_batch(step)
            loss = self.loss(batch)
            loss_v = float(loss.detach())
            if not np.isfinite(loss_v):
                diag = f"{cfg.stage}: non-finite loss at step {step}"
                restored = None
                if last_good is not None:
                    for name, mod in self.bundle.modules_by_name().items():
                        mod.load_state_dict(last_good[name])
                    restored = self.bundle
                raise TrainingDiverged(diag, restored)
            self.optimizer.zero_grad()
            loss.backward()
            if cfg.grad_clip_norm > 0:
                torch.nn.utils.clip_grad_norm_(trainable_params, cfg.grad_clip_norm)
            self.optimizer.step()
            if cfg.stage == "stage2":
                last_good = {n: copy.deepcopy(m.state_dict())
                             for n, m in self.bundle.modules_by_name().items()}
            self.log.append({"kind": "step", "step": step, "loss": loss_v})
            if first_loss is None:
                first_loss = loss_v

            if (step + 1) % steps_per_epoch == 0:
                metrics = self.validate()
                if metrics["val_loss"] < self.best_val:
                    self.best_val = metrics["val_loss"]
                    self.best_state = {
                        n: copy.deepcopy(m.state_dict())
                        for n, m in self.bundle.modules_by_name().items()}
                self.scheduler.update(metrics["val_loss"])
                rec = {"kind": "epoch", "epoch": (step + 1) // steps_per_epoch,
                       "step": step,
                       "lr": {g["name"]: g["lr"] for g in self.optimizer.param_groups}}
                rec.update(metrics)
                self.log.append(rec)

            if self._should_stop(loss_v, first_loss):
                break
        self.log.wall_s = time.time() - t0
        self.bundle.eval()
        return self.log

    def _should_stop(self, loss_v: float, first_loss: float) -> bool:
        cfg = self.cfg
        if cfg.early_stop_train_loss is not None and \
                loss_v <= cfg.early_stop_train_loss:
            return True
        if cfg.early_stop_loss_factor is not None and first_loss is not None and \
                loss_v <= first_loss / cfg.early_stop_loss_factor:
            return True
        return False

    # --- resume support ---------------------------------------------------------

    def restore_best(self) -> None:
        """Load the best-validation parameters seen during the run (the
        checkpoint-best-validation convention); live params are kept when
        no validation has happened yet."""
        if self.best_state is not None:
            for name, mod in self.bundle.modules_by_name().items():
                mod.load_state_dict(self.best_state[name])

    def save_state(self, directory: str | Path, step: int) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        self.bundle.save(d / "bundle.ckpt")
        torch.save({"optimizer": self.optimizer.state_dict(),
                    "scheduler": self.scheduler.state_dict(),
                    "best_val": self.best_val,
                    "step": step}, d / "train_state.pt")
        self.log.append({"kind": "checkpoint", "step": step,
                         "path": str(d / "bundle.ckpt")})
        self.log.save(d / "train_log.jsonl")

    def load_state(self, directory: str | Path) -> int:
        d = Path(directory)
        restored = ModelBundle.load(d / "bundle.ckpt")
        for name, mod in self.bundle.modules_by_name().items():
            mod.load_state_dict(restored.modules_by_name()[name].state_dict())
        state = torch.load(d / "train_state.pt", weights_only=False)
        self.optimizer.load_state_dict(state["optimizer"])
        self.scheduler.load_state_dict(state["scheduler"])
        self.best_val = state.get("best_val", float("inf"))
        self.log = TrainLog.load(d / "train_log.jsonl")
        return state["step"]


def train_teacher(cfg: TrainConfig, corpus: Corpus,
                  hp_overrides: dict | None = None) -> tuple[ModelBundle, TrainLog]:
    """Bootstrap the frozen clean-speech encoder (plus its extraction head)."""
    assert cfg.stage == "teacher"
    bundle = ModelBundle(cfg.hyperparams(**(hp_overrides or {})), seed=cfg.seed)
    runner = StageRunner(cfg, corpus, bundle)
    log = runner.run()
    runner.restore_best()
    bundle.stage = "teacher"
    return bundle, log


def train_stage1(cfg: TrainConfig, teacher: ModelBundle,
                 corpus: Corpus) -> tuple[ModelBundle, TrainLog]:
    """Distill the teacher's clean embedding into Siamese encoder + fusion."""
    assert cfg.stage == "stage1"
    bundle = ModelBundle(teacher.hp, seed=cfg.seed + 1)
    runner = StageRunner(cfg, corpus, bundle, teacher=teacher)
    log = runner.run()
    runner.restore_best()
    bundle.stage = "stage1"
    return bundle, log


def train_stage2(cfg: TrainConfig, encoder_bundle: ModelBundle,
                 corpus: Corpus) -> tuple[ModelBundle, TrainLog]:
    """Train the extraction branch against the frozen enrollment encoder."""
    assert cfg.stage == "stage2"
    bundle = ModelBundle(encoder_bundle.hp, seed=cfg.seed + 2)
    bundle.encoder.load_state_dict(encoder_bundle.encoder.state_dict())
    bundle.fusion.load_state_dict(encoder_bundle.fusion.state_dict())
    runner = StageRunner(cfg, corpus, bundle)
    log = runner.run()
    runner.restore_best()
    bundle.stage = "stage2"
    return bundle, log


def train_end2end(cfg: TrainConfig, corpus: Corpus,
                  hp_overrides: dict | None = None) -> tuple[ModelBundle, TrainLog]:
    """The ablation baseline: joint training with the waveform loss only."""
    assert cfg.stage == "end2end"
    bundle = ModelBundle(cfg.hyperparams(**(hp_overrides or {})), seed=cfg.seed)
    runner = StageRunner(cfg, corpus, bundle)
    log = runner.run()
    runner.restore_best()
    bundle.stage = "end2end"
    return bundle, log

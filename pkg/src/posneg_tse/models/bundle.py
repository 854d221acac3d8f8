"""Model bundle: hyperparameters, submodules, and checkpoint container.

A checkpoint is a zip holding ``meta.json`` (hyperparameters + stage tag,
versioned) and one ``.npy`` per named parameter tensor; saving the same
bundle twice yields byte-identical files, so checkpoint hashes are stable
model identities.
"""

from __future__ import annotations

import dataclasses
import hashlib
import io
import json
import zipfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .networks import EncoderFusion, EnrollmentEncoder, ExtractionBranch

FORMAT_NAME = "posneg-tse-bundle"
FORMAT_VERSION = 1
STAGES = ("init", "teacher", "stage1", "stage2", "end2end")


@dataclass(frozen=True)
class Hyperparams:
    window: int = 128
    hop: int = 64
    hidden: int = 64
    heads: int = 8
    enc_blocks: int = 3
    ext_blocks: int = 3
    pool_k: int = 40
    emb_channels: int = 48
    attn_qk_channels: int = 4
    fusion_head_dim: int = 64
    cross_head_dim: int = 64
    channel_mode: str = "mono"       # mono: 2 input channels, binaural: 4
    fusion_mode: str = "cross_attn"  # or "film"
    sample_rate: int = 16000

    def __post_init__(self):
        if self.window % self.hop != 0 or self.window // self.hop != 2:
            raise ValueError("hop must be window/2 for exact resynthesis")
        if self.channel_mode not in ("mono", "binaural"):
            raise ValueError(f"unknown channel mode {self.channel_mode!r}")

    @property
    def n_freq(self) -> int:
        return self.window // 2 + 1

    @property
    def audio_channels(self) -> int:
        return 1 if self.channel_mode == "mono" else 2

    @property
    def embed_dim(self) -> int:
        """D: per-frame embedding width, the flattened C*F encoder output."""
        return self.emb_channels * self.n_freq

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperparams":
        return cls(**d)


def paper_hyperparams(**overrides) -> Hyperparams:
    return Hyperparams(**overrides)


def toy_hyperparams(**overrides) -> Hyperparams:
    """Minutes-scale CPU training; keeps the full-size STFT geometry (128/64)
    because halving the window doubles the frame count and the recurrent
    sweeps dominate CPU cost."""
    base = dict(window=128, hop=64, hidden=16, heads=2, enc_blocks=1,
                ext_blocks=2, pool_k=40, emb_channels=4, attn_qk_channels=2,
                fusion_head_dim=16, cross_head_dim=16)
    base.update(overrides)
    return Hyperparams(**base)


def tiny_hyperparams(**overrides) -> Hyperparams:
    """Gradient-check scale: D = 8, a handful of frames."""
    base = dict(window=6, hop=3, hidden=3, heads=2, enc_blocks=1,
                ext_blocks=2, pool_k=2, emb_channels=2, attn_qk_channels=1,
                fusion_head_dim=2, cross_head_dim=2)
    base.update(overrides)
    return Hyperparams(**base)


class ModelBundle:
    """Encoder + fusion + extraction with shared hyperparameters."""

    def __init__(self, hp: Hyperparams, seed: int = 0, stage: str = "init"):
        if stage not in STAGES:
            raise ValueError(f"unknown stage {stage!r}")
        self.hp = hp
        self.stage = stage
        torch.manual_seed(seed)
        self.encoder = EnrollmentEncoder(
            hp.audio_channels, hp.window, hp.hop, hp.emb_channels, hp.hidden,
            hp.heads, hp.enc_blocks, hp.attn_qk_channels)
        self.fusion = EncoderFusion(hp.embed_dim, hp.heads, hp.fusion_head_dim)
        self.extraction = ExtractionBranch(
            hp.audio_channels, hp.window, hp.hop, hp.emb_channels, hp.hidden,
            hp.heads, hp.ext_blocks, hp.attn_qk_channels, hp.embed_dim,
            hp.cross_head_dim, hp.fusion_mode)
        self.eval()

    # --- submodule plumbing -------------------------------------------------

    def modules_by_name(self) -> dict[str, torch.nn.Module]:
        return {"encoder": self.encoder, "fusion": self.fusion,
                "extraction": self.extraction}

    def eval(self) -> "ModelBundle":
        for m in self.modules_by_name().values():
            m.eval()
        return self

    def double(self) -> "ModelBundle":
        for m in self.modules_by_name().values():
            m.double()
        return self

    def param_counts(self) -> dict[str, int]:
        counts = {f"siamese_{name}" if name == "encoder" else name:
                  sum(p.numel() for p in mod.parameters())
                  for name, mod in self.modules_by_name().items()}
        counts["total"] = sum(counts.values())
        return counts

    # --- persistence --------------------------------------------------------

    def state_arrays(self) -> dict[str, np.ndarray]:
        out = {}
        for name, mod in self.modules_by_name().items():
            for key, tensor in mod.state_dict().items():
                out[f"{name}/{key}"] = tensor.detach().cpu().numpy()
        return out

    def save(self, path: str | Path) -> None:
        meta = {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "stage": self.stage,
            "hyperparams": self.hp.to_dict(),
        }
        arrays = self.state_arrays()
        with zipfile.ZipFile(path, "w", zipfile.ZIP_STORED) as zf:
            def put(name: str, data: bytes) -> None:
                info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
                zf.writestr(info, data)

            put("meta.json", json.dumps(meta, indent=1, sort_keys=True).encode())
            for key in sorted(arrays):
                buf = io.BytesIO()
                np.save(buf, arrays[key])
                put(f"params/{key}.npy", buf.getvalue())

    @classmethod
    def load(cls, path: str | Path) -> "ModelBundle":
        with zipfile.ZipFile(path) as zf:
            meta = json.loads(zf.read("meta.json"))
            if meta.get("format") != FORMAT_NAME:
                raise ValueError(f"{path}: not a {FORMAT_NAME} checkpoint")
            if meta.get("version") != FORMAT_VERSION:
                raise ValueError(f"unsupported checkpoint version {meta.get('version')}")
            bundle = cls(Hyperparams.from_dict(meta["hyperparams"]),
                         seed=0, stage=meta["stage"])
            states: dict[str, dict[str, torch.Tensor]] = {
                n: {} for n in bundle.modules_by_name()}
            for name in zf.namelist():
                if not name.startswith("params/"):
                    continue
                key = name[len("params/"):-len(".npy")]
                mod_name, param_key = key.split("/", 1)
                arr = np.load(io.BytesIO(zf.read(name)))
                states[mod_name][param_key] = torch.from_numpy(arr)
            for mod_name, mod in bundle.modules_by_name().items():
                mod.load_state_dict(states[mod_name])
        return bundle.eval()


def checkpoint_hash(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()

"""Command-line entry points: simulate, train, evaluate, params, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


def _cmd_build_corpus(args) -> int:
    from .scenes import build_synthetic_corpus

    build_synthetic_corpus(args.out, n_speakers=args.speakers,
                           utterances_per_speaker=args.utterances,
                           utterance_s=args.utterance_s, seed=args.seed)
    print(f"synthetic corpus with {args.speakers} speakers at {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    from .scenes import Corpus, SceneSpec, realize_scene, scene_to_dir

    spec = SceneSpec.from_dict(json.loads(Path(args.spec).read_text()))
    scene = realize_scene(spec, Corpus(args.corpus))
    scene_to_dir(scene, args.out)
    print(f"scene written to {args.out}")
    return 0


def _cmd_train(args) -> int:
    import torch

    from .models import ModelBundle
    from .scenes import Corpus
    from .train import (TrainConfig, paper_scene_policy, toy_scene_policy,
                        train_end2end, train_stage1, train_stage2, train_teacher)

    torch.set_num_threads(max(1, args.threads))
    if args.manifest:
        cfg = TrainConfig.from_manifest(args.manifest)
    else:
        policy = toy_scene_policy() if args.profile == "toy" else paper_scene_policy()
        cfg = TrainConfig(stage=args.stage, profile=args.profile,
                          max_steps=args.max_steps, seed=args.seed,
                          scene_policy=policy)
    cfg.stage = args.stage or cfg.stage
    corpus = Corpus(args.corpus or cfg.corpus_root)

    if cfg.stage == "teacher":
        bundle, log = train_teacher(cfg, corpus)
    elif cfg.stage == "stage1":
        if not args.teacher:
            print("stage1 requires --teacher CHECKPOINT", file=sys.stderr)
            return 2
        bundle, log = train_stage1(cfg, ModelBundle.load(args.teacher), corpus)
    elif cfg.stage == "stage2":
        if not args.init:
            print("stage2 requires --init CHECKPOINT (stage-1 output)",
                  file=sys.stderr)
            return 2
        bundle, log = train_stage2(cfg, ModelBundle.load(args.init), corpus)
    else:
        bundle, log = train_end2end(cfg, corpus)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bundle.save(out / f"{cfg.stage}.ckpt")
    log.save(out / f"{cfg.stage}_log.jsonl")
    last = log.epochs[-1] if log.epochs else {}
    print(f"{cfg.stage} finished: {len(log.steps)} steps, "
          f"last validation {json.dumps(last)}")
    print(f"checkpoint: {out / (cfg.stage + '.ckpt')}")
    return 0


def _cmd_evaluate(args) -> int:
    from .evalharness import BundleModel, ScenarioMatrix, run_matrix
    from .models import ModelBundle, checkpoint_hash
    from .scenes import Corpus

    matrix = ScenarioMatrix.from_manifest(args.manifest)
    bundle = ModelBundle.load(args.checkpoint)
    model = BundleModel(bundle, model_id=checkpoint_hash(args.checkpoint)[:12])
    report = run_matrix(matrix, model, Corpus(args.corpus))
    report.save_json(args.out)
    if args.csv:
        report.save_csv(args.csv)
    print(f"report with {len(report.rows)} rows -> {args.out}")
    return 0


def _cmd_params(args) -> int:
    from .models import ModelBundle, checkpoint_hash

    bundle = ModelBundle.load(args.checkpoint)
    counts = bundle.param_counts()
    print(f"checkpoint: {args.checkpoint}")
    print(f"model id:   {checkpoint_hash(args.checkpoint)[:12]}")
    print(f"stage:      {bundle.stage}")
    for name, n in counts.items():
        print(f"  {name:<18} {n:>10,}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    cfg = ServiceConfig(unlabeled_is_negative=args.unlabeled_is_negative)
    app = create_app(args.data, args.models, cfg,
                     static_dir=args.static or None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posneg-tse",
        description="Target speaker extraction from positive/negative "
                    "enrollment pairs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-corpus", help="generate the synthetic mini-corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--speakers", type=int, default=12)
    p.add_argument("--utterances", type=int, default=4)
    p.add_argument("--utterance-s", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=1234)
    p.set_defaults(func=_cmd_build_corpus)

    p = sub.add_parser("simulate", help="realize one scene from a spec JSON")
    p.add_argument("--spec", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("train", help="run one training stage")
    p.add_argument("--stage", choices=["teacher", "stage1", "stage2", "end2end"])
    p.add_argument("--profile", choices=["toy", "paper"], default="toy")
    p.add_argument("--manifest", help="TrainConfig JSON")
    p.add_argument("--corpus")
    p.add_argument("--teacher", help="teacher checkpoint (stage1)")
    p.add_argument("--init", help="encoder checkpoint (stage2)")
    p.add_argument("--out", default="runs")
    p.add_argument("--max-steps", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="run a scenario-matrix evaluation")
    p.add_argument("--manifest", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("params", help="checkpoint parameter counts")
    p.add_argument("checkpoint")
    p.set_defaults(func=_cmd_params)

    p = sub.add_parser("serve", help="run the extraction HTTP service")
    p.add_argument("--data", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--static", help="directory of UI assets to serve at /")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--unlabeled-is-negative", action="store_true",
                   help="treat unlabeled time as negative enrollment")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

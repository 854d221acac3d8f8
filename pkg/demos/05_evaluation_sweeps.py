"""Evaluation harness: sanity models, scenario matrices, and sweeps.

Run:  python demos/05_evaluation_sweeps.py
Uses the checkpoint from demo 04 when present, else an untrained bundle.
Writes CSV/PNG reports to demos/output/.
"""

from pathlib import Path

from posneg_tse.evalharness import (
    BundleModel,
    IdentityModel,
    OracleModel,
    ScenarioMatrix,
    clean_enroll_eval,
    confusion_study,
    label_noise_eval,
    plot_rows,
    run_matrix,
    sweep_pi_length,
)
from posneg_tse.models import ModelBundle, toy_hyperparams
from posneg_tse.scenes import Corpus, build_synthetic_corpus

out = Path(__file__).parent / "output"
corpus_dir = out / "corpus"
if not (corpus_dir / "index.json").exists():
    build_synthetic_corpus(corpus_dir)
corpus = Corpus(corpus_dir)

ckpt = out / "two_stage_demo.ckpt"
if ckpt.exists():
    model = BundleModel(ModelBundle.load(ckpt))
    print(f"using trained demo checkpoint ({model.model_id})")
else:
    model = BundleModel(ModelBundle(toy_hyperparams(), seed=1), model_id="untrained")
    print("no demo checkpoint found; using an untrained bundle "
          "(run demos/04 first for meaningful curves)")

matrix = ScenarioMatrix(mixture_speakers=[2, 3], enroll_speakers=[2, 3],
                        n_samples=10, seed=3, metrics=["snr_i", "si_snr_i"],
                        pos_len_s=0.5, neg_len_s=0.5, mix_len_s=0.5)

print("\nharness sanity: identity model improvements are exactly zero")
identity_report = run_matrix(matrix, IdentityModel(), corpus)
print({f"{r.scenario['mixture_speakers']}x{r.scenario['enroll_speakers']}":
       r.mean for r in identity_report.select("snr_i")})

print("oracle model SNR sits at the cap, so improvements exceed it")
oracle_report = run_matrix(matrix, OracleModel(), corpus)
print({f"{r.scenario['mixture_speakers']}x{r.scenario['enroll_speakers']}":
       round(r.mean, 2) for r in oracle_report.select("snr_i")})

print("\nscenario matrix for the evaluated model:")
report = run_matrix(matrix, model, corpus)
for row in report.select("si_snr_i"):
    print(f"  mix={row.scenario['mixture_speakers']} "
          f"enroll={row.scenario['enroll_speakers']}: "
          f"{row.mean:6.2f} +- {row.std:.2f} dB (n={row.n})")
report.save_json(out / "matrix_report.json")
report.save_csv(out / "matrix_report.csv")

print("\nsweep: SI-SNRi vs the overlap length of the positive interferer")
sweep = sweep_pi_length(model, corpus, grid=[0.0, 0.25, 0.5], n=10,
                        pos_len_s=0.5, neg_len_s=0.5, mix_len_s=0.5)
for row in sweep.rows:
    print(f"  l_pos={row.scenario['l_pos_s']:.2f} {row.metric:16s} "
          f"{row.mean:7.2f} dB")
sweep.save_csv(out / "pi_length_sweep.csv")
plot_rows(sweep, "si_snr_i_target", "l_pos_s", out / "pi_length_sweep.png")
print(f"curve -> {out / 'pi_length_sweep.png'}")

print("\ntarget-confusion study (oracle should never confuse):")
print(" ", confusion_study(OracleModel(), corpus, n=20))
print("clean-enrollment fallback eval:")
clean = clean_enroll_eval(model, corpus, n=5)
print(" ", [(r.metric, None if r.mean is None else round(r.mean, 2))
            for r in clean.rows])

print("label-noise robustness (jitter on boundary timestamps):")
noise = label_noise_eval(model, corpus, jitter_grid_s=[0.0, 0.1], n=5,
                         pos_len_s=0.5, neg_len_s=0.5, mix_len_s=0.5)
for row in noise.rows:
    print(f"  jitter={row.scenario['jitter_s']}: "
          f"{'skipped: ' + row.skipped if row.mean is None else round(row.mean, 2)}")

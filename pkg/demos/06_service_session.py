"""The labeling service driven end to end, in process.

Run:  python demos/06_service_session.py
Same HTTP surface the browser UI speaks; here exercised with a test client.
"""

import io
from pathlib import Path

from fastapi.testclient import TestClient

from posneg_tse.audio import concatenate, read_wav, write_wav
from posneg_tse.models import ModelBundle, toy_hyperparams
from posneg_tse.scenes import Corpus, ScenePolicy, SceneStream, build_synthetic_corpus
from posneg_tse.service import ServiceConfig, create_app

out = Path(__file__).parent / "output"
corpus_dir = out / "corpus"
if not (corpus_dir / "index.json").exists():
    build_synthetic_corpus(corpus_dir)
corpus = Corpus(corpus_dir)

model_dir = out / "models"
model_dir.mkdir(parents=True, exist_ok=True)
ckpt = out / "two_stage_demo.ckpt"
if ckpt.exists():
    (model_dir / "demo.ckpt").write_bytes(ckpt.read_bytes())
else:
    ModelBundle(toy_hyperparams(), seed=1).save(model_dir / "demo.ckpt")

app = create_app(out / "service_data", model_dir, ServiceConfig(min_pos_s=0.5))
client = TestClient(app)
print("models:", client.get("/v1/models").json())

# a recording whose first half is positive (target speaking), second half
# negative (target silent); the mixture comes from the same scene family
scene = SceneStream(ScenePolicy(pos_len_s=1.0, neg_len_s=1.0, mix_len_s=2.0),
                    corpus, base_seed=42).scene(0)
recording = concatenate([scene.positive, scene.negative])

buf = io.BytesIO()
write_wav(buf, recording)
resp = client.post("/v1/sessions",
                   files={"file": ("rec.wav", buf.getvalue(), "audio/wav")})
session = resp.json()
print("uploaded:", session)

labels = [{"start_s": 0.0, "end_s": 1.0, "polarity": "POS"},
          {"start_s": 1.0, "end_s": 2.0, "polarity": "NEG"}]
resp = client.put(f"/v1/sessions/{session['id']}/labels", json=labels)
print("labeled:", resp.json()["status"], "pseudo_negative:",
      resp.json()["pseudo_negative"])

buf = io.BytesIO()
write_wav(buf, scene.mixture)
mix_session = client.post(
    "/v1/sessions",
    files={"file": ("mix.wav", buf.getvalue(), "audio/wav")}).json()

resp = client.post(f"/v1/sessions/{session['id']}/extract",
                   json={"mixture_session": mix_session["id"]})
print("extraction:", resp.json())

wav = client.get(f"/v1/sessions/{session['id']}/result")
result = read_wav(io.BytesIO(wav.content))
print(f"result: {result.duration_s:.2f} s of audio "
      f"({len(wav.content)} bytes, status {wav.status_code})")

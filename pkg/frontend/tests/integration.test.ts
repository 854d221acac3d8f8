/**
 * End-to-end against a live service: spawn the python server with a toy
 * checkpoint, round-trip labels through the real API, run the
 * extract-and-play flow.
 */

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { AbPlayer, decodeWavPcm16 } from "../src/player.js";
import { RegionAnnotation, fromPayload, sameOnGrid, toPayload } from "../src/regions.js";
import { UiSession } from "../src/session.js";

const PORT = 8731 + Math.floor(Math.random() * 200);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let workDir: string;

function pcm16Wav(samples: Float32Array, rate = 16000): Uint8Array {
  const n = samples.length;
  const buf = new ArrayBuffer(44 + 2 * n);
  const v = new DataView(buf);
  const tag = (o: number, s: string) => {
    for (let i = 0; i < s.length; i++) v.setUint8(o + i, s.charCodeAt(i));
  };
  tag(0, "RIFF");
  v.setUint32(4, 36 + 2 * n, true);
  tag(8, "WAVE");
  tag(12, "fmt ");
  v.setUint32(16, 16, true);
  v.setUint16(20, 1, true);
  v.setUint16(22, 1, true);
  v.setUint32(24, rate, true);
  v.setUint32(28, rate * 2, true);
  v.setUint16(32, 2, true);
  v.setUint16(34, 16, true);
  tag(36, "data");
  v.setUint32(40, 2 * n, true);
  for (let i = 0; i < n; i++) {
    v.setInt16(44 + 2 * i, Math.round(Math.max(-1, Math.min(1, samples[i])) * 32767), true);
  }
  return new Uint8Array(buf);
}

function testRecording(seconds = 4, rate = 16000): Float32Array {
  const out = new Float32Array(seconds * rate);
  for (let i = 0; i < out.length; i++) {
    const t = i / rate;
    const voice = 0.35 * Math.sin(2 * Math.PI * 520 * t) * (t < 2 ? 1 : 0.05);
    const hum = 0.1 * Math.sin(2 * Math.PI * 90 * t);
    out[i] = voice + hum;
  }
  return out;
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "labeler-it-"));
  const prep = spawnSync("python3", ["-c", `
from posneg_tse.models import ModelBundle, toy_hyperparams
from pathlib import Path
models = Path(${JSON.stringify(workDir)}) / "models"
models.mkdir()
ModelBundle(toy_hyperparams(), seed=31).save(models / "toy.ckpt")
`]);
  if (prep.status !== 0) {
    throw new Error(`checkpoint prep failed: ${prep.stderr}`);
  }
  server = spawn("posneg-tse", [
    "serve", "--data", join(workDir, "data"), "--models", join(workDir, "models"),
    "--port", String(PORT),
  ], { stdio: "ignore" });
  const deadline = Date.now() + 30000;
  for (;;) {
    try {
      const resp = await fetch(`${BASE}/v1/models`);
      if (resp.ok) break;
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) throw new Error("service did not come up");
    await new Promise((r) => setTimeout(r, 300));
  }
}, 60000);

afterAll(() => {
  server?.kill();
});

describe("labeler against the live service", () => {
  it("round-trips random region sets on the 10 ms grid", async () => {
    const api = new ApiClient(BASE);
    const wav = pcm16Wav(testRecording());
    let seed = 424242;
    const rand = () => {
      seed = (seed * 1103515245 + 12345) % 2 ** 31;
      return seed / 2 ** 31;
    };
    for (let trial = 0; trial < 5; trial++) {
      const session = await UiSession.fromUpload(api, wav);
      // one guaranteed POS region, then random non-overlapping extras
      session.addRegion({ start_s: 0, end_s: 1, polarity: "POS" });
      for (let k = 0; k < 6; k++) {
        const a = rand() * 4;
        const b = Math.min(4, a + 0.2 + rand());
        const polarity = rand() < 0.5 ? "POS" : "NEG";
        const start = Math.round(a * 100) / 100;
        const end = Math.round(b * 100) / 100;
        if (end - start < 0.02) continue;
        session.addRegion({ start_s: start, end_s: end, polarity });
      }
      const sent: RegionAnnotation[] = toPayload(session.regions);
      expect(await session.syncLabels()).toBe(true);

      const fetched = await api.getSession(session.sessionId);
      expect(sameOnGrid(fromPayload(fetched.labels), sent)).toBe(true);
    }
  }, 60000);

  it("server rejects what local validation rejects (min POS)", async () => {
    const api = new ApiClient(BASE);
    const session = await UiSession.fromUpload(api, pcm16Wav(testRecording()));
    session.addRegion({ start_s: 0, end_s: 0.3, polarity: "POS" });
    expect(await session.syncLabels()).toBe(false); // local gate fires
    expect(session.inlineError).toMatch(/0.5/);

    // bypass the local gate to prove the server agrees
    try {
      await api.putLabels(session.sessionId, [
        { start_s: 0, end_s: 0.3, polarity: "POS" },
      ]);
      throw new Error("server accepted an under-length POS set");
    } catch (err: any) {
      expect(err.code).toBe("positive_too_short");
    }
  }, 30000);

  it("extract-and-play completes with a toy checkpoint", async () => {
    const api = new ApiClient(BASE);
    const recording = testRecording();
    const session = await UiSession.fromUpload(api, pcm16Wav(recording));
    session.addRegion({ start_s: 0, end_s: 2, polarity: "POS" });
    session.addRegion({ start_s: 2, end_s: 4, polarity: "NEG" });

    const state = await session.runExtraction({});
    expect(state.kind).toBe("done");

    const wavBytes = await session.fetchResult();
    const { samples, sampleRate } = decodeWavPcm16(wavBytes);
    expect(sampleRate).toBe(16000);
    expect(samples.length).toBe(recording.length);

    // A/B audition: aligned sources, toggle keeps the playhead
    const player = new AbPlayer(recording, samples, sampleRate);
    player.play();
    for (let i = 0; i < 100; i++) player.nextBlock();
    const before = player.position;
    player.toggle();
    expect(Math.abs(player.position - before)).toBeLessThanOrEqual(player.quantum);
    expect(player.nextBlock()).not.toBeNull();

    // re-running after a label edit issues a fresh request (no stale result)
    session.addRegion({ start_s: 1.5, end_s: 1.9, polarity: "NEG" });
    const rerun = await session.runExtraction({});
    expect(rerun.kind).toBe("done");
  }, 120000);
});

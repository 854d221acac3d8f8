/** Browser glue: wires the view models to canvas, controls, and WebAudio. */

import { ApiClient } from "./api.js";
import { AbPlayer, assembleSpans, decodeWavPcm16 } from "./player.js";
import { Polarity } from "./regions.js";
import { UiSession } from "./session.js";
import { WaveformView, polarityColor } from "./waveform.js";

const api = new ApiClient("");

let session: UiSession | null = null;
let view: WaveformView | null = null;
let player: AbPlayer | null = null;
let polarity: Polarity = "POS";
let dragStartPx: number | null = null;
let audioCtx: AudioContext | null = null;
let playNode: AudioBufferSourceNode | null = null;

const $ = (id: string) => document.getElementById(id)!;
const canvas = () => $("wave") as HTMLCanvasElement;
const status = (text: string) => {
  $("status").textContent = text;
};

function draw(): void {
  if (!view || !session) return;
  const c = canvas();
  const ctx = c.getContext("2d")!;
  ctx.clearRect(0, 0, c.width, c.height);
  const mid = c.height / 2;
  ctx.strokeStyle = "#4a7";
  ctx.beginPath();
  view.peaks().forEach(([lo, hi], x) => {
    ctx.moveTo(x, mid + lo * mid * 0.9);
    ctx.lineTo(x, mid + hi * mid * 0.9 + 0.5);
  });
  ctx.stroke();
  for (const r of session.regions) {
    const x0 = view.secondsToPx(r.start_s);
    const x1 = view.secondsToPx(r.end_s);
    ctx.fillStyle = polarityColor(r.polarity);
    ctx.fillRect(x0, 0, x1 - x0, c.height);
  }
  ctx.fillStyle = "#889";
  ctx.font = "10px sans-serif";
  for (const t of view.axisTicks()) {
    ctx.fillText(`${t.toFixed(1)}s`, view.secondsToPx(t) + 2, c.height - 4);
  }
  const list = $("regions");
  list.innerHTML = "";
  session.regions.forEach((r, i) => {
    const li = document.createElement("li");
    li.textContent = `${r.polarity} ${r.start_s.toFixed(2)}-${r.end_s.toFixed(2)}s `;
    const del = document.createElement("button");
    del.textContent = "x";
    del.onclick = () => {
      session!.removeRegion(i);
      draw();
    };
    li.appendChild(del);
    list.appendChild(li);
  });
  $("error").textContent = session.inlineError ?? "";
}

async function onFile(file: File): Promise<void> {
  const bytes = new Uint8Array(await file.arrayBuffer());
  session = await UiSession.fromUpload(api, bytes);
  const decoded = decodeWavPcm16(bytes.buffer as ArrayBuffer);
  view = new WaveformView(decoded.samples, decoded.sampleRate, canvas().width);
  status(`session ${session.sessionId}: ${session.durationS.toFixed(2)} s`);
  draw();
}

async function runExtraction(): Promise<void> {
  if (!session || !view) return;
  status("extracting ...");
  const state = await session.runExtraction({});
  draw();
  if (state.kind === "failed") {
    status(`failed: ${state.message}`);
    return;
  }
  if (state.kind !== "done") return;
  const wav = await session.fetchResult();
  const extracted = decodeWavPcm16(wav);
  const n = Math.min(view.samples.length, extracted.samples.length);
  player = new AbPlayer(view.samples.slice(0, n), extracted.samples.slice(0, n),
    extracted.sampleRate);
  const si = state.siSnrI === undefined ? "" : ` (SI-SNRi ${state.siSnrI.toFixed(2)} dB)`;
  status(`done${si}; press play to audition, toggle for A/B`);
  ($("play") as HTMLButtonElement).disabled = false;
  ($("toggle") as HTMLButtonElement).disabled = false;
}

function playCurrent(): void {
  if (!player) return;
  audioCtx = audioCtx ?? new AudioContext({ sampleRate: player.sampleRate });
  playNode?.stop();
  const rest = player.current().slice(player.position);
  const buffer = audioCtx.createBuffer(1, rest.length, player.sampleRate);
  buffer.copyToChannel(rest, 0);
  playNode = audioCtx.createBufferSource();
  playNode.buffer = buffer;
  playNode.connect(audioCtx.destination);
  const startedAt = audioCtx.currentTime;
  const startPos = player.position;
  playNode.onended = () => {
    if (player) {
      player.position = Math.min(
        player.lengthSamples,
        startPos + Math.round((audioCtx!.currentTime - startedAt) * player.sampleRate),
      );
    }
  };
  playNode.start();
  player.play();
}

function previewSpans(polarity: "POS" | "NEG"): void {
  // debug aid: audition the enrollment assembly the server will build
  if (!session || !view) return;
  const assembled = assembleSpans(view.samples, view.sampleRate,
    session.regions, polarity);
  if (assembled.length === 0) {
    status(`no ${polarity} regions to preview`);
    return;
  }
  audioCtx = audioCtx ?? new AudioContext({ sampleRate: view.sampleRate });
  const buffer = audioCtx.createBuffer(1, assembled.length, view.sampleRate);
  buffer.copyToChannel(assembled as Float32Array<ArrayBuffer>, 0);
  const node = audioCtx.createBufferSource();
  node.buffer = buffer;
  node.connect(audioCtx.destination);
  node.start();
  status(`previewing assembled ${polarity} enrollment `
    + `(${(assembled.length / view.sampleRate).toFixed(2)} s)`);
}

function wireUp(): void {
  ($("file") as HTMLInputElement).addEventListener("change", (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file) void onFile(file);
  });
  $("pos").addEventListener("click", () => {
    polarity = "POS";
    status("drag to mark where the target speaker talks");
  });
  $("neg").addEventListener("click", () => {
    polarity = "NEG";
    status("drag to mark where the target speaker is silent");
  });
  canvas().addEventListener("mousedown", (ev) => {
    dragStartPx = ev.offsetX;
  });
  canvas().addEventListener("mouseup", (ev) => {
    if (dragStartPx === null || !session || !view) return;
    const region = view.dragToRegion(dragStartPx, ev.offsetX, polarity);
    dragStartPx = null;
    if (region) {
      session.addRegion(region);
      draw();
    }
  });
  $("sync").addEventListener("click", async () => {
    if (!session) return;
    const ok = await session.syncLabels();
    draw();
    status(ok ? "labels synced" : "labels rejected");
  });
  $("extract").addEventListener("click", () => void runExtraction());
  $("preview-pos").addEventListener("click", () => previewSpans("POS"));
  $("preview-neg").addEventListener("click", () => previewSpans("NEG"));
  $("play").addEventListener("click", playCurrent);
  $("toggle").addEventListener("click", () => {
    if (!player) return;
    const source = player.toggle();
    $("toggle").textContent = `listening: ${source}`;
    if (player.playing) playCurrent();
  });
}

document.addEventListener("DOMContentLoaded", wireUp);

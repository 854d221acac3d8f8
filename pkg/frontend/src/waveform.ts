/**
 * Waveform view model: peak computation, zoom/scroll window, and the
 * pixel <-> seconds mapping that turns drags into regions.
 *
 * Rendering itself (canvas strokes) lives in main.ts; everything here is
 * pure and unit-tested.
 */

import { Polarity, RegionAnnotation, regionFromDrag } from "./regions.js";

export interface ViewWindow {
  startS: number;
  endS: number; // visible span, clamped to [0, duration]
}

export class WaveformView {
  window: ViewWindow;

  constructor(
    public readonly samples: Float32Array,
    public readonly sampleRate: number,
    public widthPx: number,
  ) {
    this.window = { startS: 0, endS: this.durationS };
  }

  get durationS(): number {
    return this.samples.length / this.sampleRate;
  }

  /** Time axis ticks in seconds for the current window. */
  axisTicks(maxTicks = 10): number[] {
    const span = this.window.endS - this.window.startS;
    const raw = span / maxTicks;
    const step = [0.1, 0.2, 0.5, 1, 2, 5, 10, 30, 60].find((s) => s >= raw) ?? 60;
    const ticks: number[] = [];
    const first = Math.ceil(this.window.startS / step) * step;
    for (let t = first; t <= this.window.endS + 1e-9; t += step) {
      ticks.push(Math.round(t * 100) / 100);
    }
    return ticks;
  }

  pxToSeconds(px: number): number {
    const frac = Math.min(1, Math.max(0, px / this.widthPx));
    return this.window.startS + frac * (this.window.endS - this.window.startS);
  }

  secondsToPx(t: number): number {
    const span = this.window.endS - this.window.startS;
    return ((t - this.window.startS) / span) * this.widthPx;
  }

  /** Min/max amplitude per pixel column for the visible window. */
  peaks(): Array<[number, number]> {
    const out: Array<[number, number]> = [];
    const s0 = Math.floor(this.window.startS * this.sampleRate);
    const s1 = Math.min(this.samples.length,
      Math.ceil(this.window.endS * this.sampleRate));
    const perPx = Math.max(1, (s1 - s0) / this.widthPx);
    for (let x = 0; x < this.widthPx; x++) {
      const a = s0 + Math.floor(x * perPx);
      const b = Math.min(s1, s0 + Math.floor((x + 1) * perPx) + 1);
      let lo = 0;
      let hi = 0;
      for (let i = a; i < b; i++) {
        const v = this.samples[i] ?? 0;
        if (v < lo) lo = v;
        if (v > hi) hi = v;
      }
      out.push([lo, hi]);
    }
    return out;
  }

  zoom(factor: number, centerPx: number): void {
    const center = this.pxToSeconds(centerPx);
    const span = (this.window.endS - this.window.startS) / factor;
    let start = center - span / 2;
    let end = center + span / 2;
    if (start < 0) {
      end -= start;
      start = 0;
    }
    if (end > this.durationS) {
      start -= end - this.durationS;
      end = this.durationS;
    }
    this.window = { startS: Math.max(0, start), endS: Math.min(this.durationS, end) };
  }

  scroll(deltaPx: number): void {
    const span = this.window.endS - this.window.startS;
    let start = this.window.startS + (deltaPx / this.widthPx) * span;
    start = Math.max(0, Math.min(this.durationS - span, start));
    this.window = { startS: start, endS: start + span };
  }

  /** Turn a pixel drag into a (snapped, normalized) region annotation. */
  dragToRegion(
    fromPx: number,
    toPx: number,
    polarity: Polarity,
  ): RegionAnnotation | null {
    return regionFromDrag(
      this.pxToSeconds(fromPx),
      this.pxToSeconds(toPx),
      polarity,
      this.durationS,
    );
  }
}

/** Display color per polarity (shared by canvas and legend). */
export function polarityColor(polarity: Polarity): string {
  return polarity === "POS" ? "rgba(46, 160, 67, 0.35)" : "rgba(208, 58, 82, 0.35)";
}

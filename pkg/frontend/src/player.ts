/**
 * A/B audition model: mixture vs extraction, sample-aligned.
 *
 * Playback state lives here; the audio device is abstracted behind a
 * sink callback so the model is unit-testable. Toggling sources keeps
 * the playhead, so the ear compares the same instant in both signals.
 */

export type Source = "mixture" | "extraction";

export class AbPlayer {
  position = 0; // samples into the aligned span
  playing = false;
  source: Source = "mixture";

  constructor(
    private mixture: Float32Array,
    private extraction: Float32Array,
    public readonly sampleRate: number,
    public readonly quantum = 128,
  ) {
    if (mixture.length !== extraction.length) {
      throw new Error("A/B sources must be sample-aligned (equal length)");
    }
  }

  get lengthSamples(): number {
    return this.mixture.length;
  }

  current(): Float32Array {
    return this.source === "mixture" ? this.mixture : this.extraction;
  }

  play(): void {
    this.playing = true;
  }

  pause(): void {
    this.playing = false;
  }

  seekSeconds(t: number): void {
    const s = Math.round(t * this.sampleRate);
    this.position = Math.max(0, Math.min(this.lengthSamples, s));
  }

  /**
   * Switch sources in place. The playhead moves by at most one audio
   * quantum (it re-aligns to the current quantum boundary, matching how
   * a block-based audio device would pick up the new buffer).
   */
  toggle(): Source {
    this.source = this.source === "mixture" ? "extraction" : "mixture";
    this.position = Math.floor(this.position / this.quantum) * this.quantum;
    return this.source;
  }

  /** Pull the next block for the device; advances the playhead. */
  nextBlock(): Float32Array | null {
    if (!this.playing || this.position >= this.lengthSamples) {
      this.playing = this.position < this.lengthSamples && this.playing;
      return null;
    }
    const end = Math.min(this.position + this.quantum, this.lengthSamples);
    const block = this.current().slice(this.position, end);
    this.position = end;
    return block;
  }
}

/**
 * Concatenate the sample spans of one polarity, in label order: the same
 * assembly the server performs, exposed for the debug preview.
 */
export function assembleSpans(
  samples: Float32Array,
  sampleRate: number,
  regions: Array<{ start_s: number; end_s: number; polarity: string }>,
  polarity: string,
): Float32Array {
  const parts = regions
    .filter((r) => r.polarity === polarity)
    .sort((a, b) => a.start_s - b.start_s)
    .map((r) =>
      samples.slice(
        Math.round(r.start_s * sampleRate),
        Math.round(r.end_s * sampleRate),
      ),
    );
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Float32Array(total);
  let at = 0;
  for (const p of parts) {
    out.set(p, at);
    at += p.length;
  }
  return out;
}

/** Decode 16-bit PCM WAV bytes into mono float samples. */
export function decodeWavPcm16(buffer: ArrayBuffer): {
  samples: Float32Array;
  sampleRate: number;
} {
  const view = new DataView(buffer);
  if (view.getUint32(0, false) !== 0x52494646) {
    throw new Error("not a RIFF file");
  }
  let offset = 12;
  let sampleRate = 0;
  let channels = 1;
  let dataStart = -1;
  let dataLen = 0;
  while (offset + 8 <= view.byteLength) {
    const id = view.getUint32(offset, false);
    const size = view.getUint32(offset + 4, true);
    if (id === 0x666d7420) { // "fmt "
      channels = view.getUint16(offset + 10, true);
      sampleRate = view.getUint32(offset + 12, true);
    } else if (id === 0x64617461) { // "data"
      dataStart = offset + 8;
      dataLen = size;
    }
    offset += 8 + size + (size % 2);
  }
  if (dataStart < 0 || sampleRate === 0) throw new Error("no data chunk");
  const n = Math.floor(dataLen / 2 / channels);
  const samples = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    let acc = 0;
    for (let c = 0; c < channels; c++) {
      acc += view.getInt16(dataStart + 2 * (i * channels + c), true);
    }
    samples[i] = acc / channels / 32767;
  }
  return { samples, sampleRate };
}

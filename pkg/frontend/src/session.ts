/**
 * UI session state: regions, server sync, extraction lifecycle.
 *
 * Mirrors the server session after every exchange; one extract request
 * in flight at a time; editing labels invalidates any previous result so
 * a re-run never serves stale audio.
 */

import { ApiClient, ApiError, SessionInfo } from "./api.js";
import {
  RegionAnnotation,
  addRegion,
  fromPayload,
  removeRegion,
  toPayload,
  validateRegions,
} from "./regions.js";

export type ExtractionState =
  | { kind: "idle" }
  | { kind: "syncing" }
  | { kind: "extracting" }
  | { kind: "done"; resultUrl: string; siSnrI?: number }
  | { kind: "failed"; message: string };

export class UiSession {
  regions: RegionAnnotation[] = [];
  state: ExtractionState = { kind: "idle" };
  inlineError: string | null = null;
  serverSession: SessionInfo | null = null;
  private labelsDirty = true;
  private inFlight = false;

  constructor(
    private api: ApiClient,
    public sessionId: string,
    public durationS: number,
    private minPosS = 0.5,
  ) {}

  static async fromUpload(api: ApiClient, wav: Blob | Uint8Array): Promise<UiSession> {
    const created = await api.createSession(wav);
    return new UiSession(api, created.id, created.duration_s);
  }

  addRegion(region: RegionAnnotation): void {
    this.regions = addRegion(this.regions, region);
    this.markDirty();
  }

  removeRegion(index: number): void {
    this.regions = removeRegion(this.regions, index);
    this.markDirty();
  }

  private markDirty(): void {
    this.labelsDirty = true;
    this.inlineError = null;
    if (this.state.kind === "done") this.state = { kind: "idle" };
  }

  /** Local gate mirrored from the server; blocks submit when violated. */
  validate(): string | null {
    return validateRegions(this.regions, this.durationS, this.minPosS);
  }

  async syncLabels(): Promise<boolean> {
    const problem = this.validate();
    if (problem) {
      this.inlineError = problem;
      return false;
    }
    this.state = { kind: "syncing" };
    try {
      this.serverSession = await this.api.putLabels(
        this.sessionId,
        toPayload(this.regions),
      );
      this.regions = fromPayload(this.serverSession.labels);
      this.labelsDirty = false;
      this.state = { kind: "idle" };
      this.inlineError = null;
      return true;
    } catch (err) {
      this.state = { kind: "idle" };
      this.inlineError = err instanceof ApiError
        ? `${err.code}: ${err.message}`
        : String(err);
      return false;
    }
  }

  /**
   * Run extraction and poll until a result exists. Labels are synced
   * first when edited since the last run.
   */
  async runExtraction(options: {
    span?: [number, number];
    model?: string;
    mixtureSession?: string;
    pollMs?: number;
    maxPolls?: number;
  } = {}): Promise<ExtractionState> {
    if (this.inFlight) return this.state;
    if (this.labelsDirty && !(await this.syncLabels())) {
      return this.state;
    }
    this.inFlight = true;
    this.state = { kind: "extracting" };
    try {
      const resp = await this.api.extract(this.sessionId, options);
      let status = resp.status;
      let polls = 0;
      while (status !== "done" && status !== "failed") {
        if (polls++ >= (options.maxPolls ?? 100)) {
          this.state = { kind: "failed", message: "timed out; retry available" };
          return this.state;
        }
        await sleep(options.pollMs ?? 150);
        const session = await this.api.getSession(this.sessionId);
        status = session.status;
      }
      if (status === "failed") {
        const session = await this.api.getSession(this.sessionId);
        this.state = { kind: "failed", message: session.error ?? "extraction failed" };
      } else {
        this.state = {
          kind: "done",
          resultUrl: resp.result_url,
          siSnrI: resp.si_snr_i,
        };
      }
    } catch (err) {
      // labels survive a failed run; only the state reflects the error
      this.state = {
        kind: "failed",
        message: err instanceof ApiError ? `${err.code}: ${err.message}` : String(err),
      };
    } finally {
      this.inFlight = false;
    }
    return this.state;
  }

  async fetchResult(): Promise<ArrayBuffer> {
    if (this.state.kind !== "done") {
      throw new Error("no result to fetch");
    }
    return this.api.fetchResult(this.sessionId);
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

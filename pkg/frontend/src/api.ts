/** Typed client for the extraction service HTTP API. */

import type { RegionAnnotation } from "./regions.js";

export interface SessionInfo {
  id: string;
  status: string;
  duration_s: number;
  labels: RegionAnnotation[];
  pseudo_negative: boolean;
  result_url?: string;
  error?: string | null;
}

export interface ExtractResponse {
  status: string;
  result_url: string;
  model?: string;
  duration_s?: number;
  timing_s?: number;
  si_snr_i?: number;
}

export interface ModelInfo {
  id: string;
  file: string;
  stage: string;
  channel_mode: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function fail(resp: Response): Promise<never> {
  let code = "unknown";
  let message = resp.statusText;
  try {
    const body = await resp.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(resp.status, code, message);
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async createSession(wav: Blob | Uint8Array, name = "upload.wav"): Promise<{
    id: string;
    duration_s: number;
  }> {
    const blob = wav instanceof Blob ? wav : new Blob([wav as BlobPart]);
    const form = new FormData();
    form.append("file", blob, name);
    const resp = await fetch(this.url("/v1/sessions"), {
      method: "POST",
      body: form,
    });
    if (!resp.ok) await fail(resp);
    return resp.json();
  }

  async getSession(id: string): Promise<SessionInfo> {
    const resp = await fetch(this.url(`/v1/sessions/${id}`));
    if (!resp.ok) await fail(resp);
    return resp.json();
  }

  async putLabels(id: string, labels: RegionAnnotation[]): Promise<SessionInfo> {
    const resp = await fetch(this.url(`/v1/sessions/${id}/labels`), {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(labels),
    });
    if (!resp.ok) await fail(resp);
    return resp.json();
  }

  async extract(
    id: string,
    options: {
      span?: [number, number];
      model?: string;
      mixtureSession?: string;
    } = {},
  ): Promise<ExtractResponse> {
    const body: Record<string, unknown> = {};
    if (options.span) body.span = options.span;
    if (options.model) body.model = options.model;
    if (options.mixtureSession) body.mixture_session = options.mixtureSession;
    const resp = await fetch(this.url(`/v1/sessions/${id}/extract`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) await fail(resp);
    return resp.json();
  }

  async fetchResult(id: string): Promise<ArrayBuffer> {
    const resp = await fetch(this.url(`/v1/sessions/${id}/result`));
    if (!resp.ok) await fail(resp);
    return resp.arrayBuffer();
  }

  async listModels(): Promise<ModelInfo[]> {
    const resp = await fetch(this.url("/v1/models"));
    if (!resp.ok) await fail(resp);
    return resp.json();
  }
}

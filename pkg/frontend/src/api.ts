/** Thin typed client for the service's three annotation endpoints.
 * Every outcome the UI has to branch on is a value, not an exception;
 * only transport failures reject. */

import type { SubmitBody } from "./model.js";

export interface TaskPayload {
  sample_id: string;
  image: string;
  description: string;
}

export interface FinalLabel {
  hallucinated: boolean;
  category: string | null;
  tie_flag: boolean;
}

export type NextResult =
  | { kind: "task"; task: TaskPayload }
  | { kind: "done" };

export type SubmitResult =
  | { kind: "accepted"; final: FinalLabel | null }
  | { kind: "duplicate" }
  | { kind: "invalid"; field: string; error: string };

export interface Progress {
  pending: number;
  partially_annotated: number;
  finalized: number;
  ties: number;
}

export class NetworkError extends Error {}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async call(path: string, init?: RequestInit): Promise<Response> {
    try {
      return await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new NetworkError(String(err));
    }
  }

  async fetchNext(annotatorId: string): Promise<NextResult> {
    const res = await this.call(
      `/v1/annotation/next?annotator=${encodeURIComponent(annotatorId)}`,
    );
    if (res.status === 204) return { kind: "done" };
    if (!res.ok) throw new NetworkError(`next failed: HTTP ${res.status}`);
    return { kind: "task", task: (await res.json()) as TaskPayload };
  }

  async submit(body: SubmitBody): Promise<SubmitResult> {
    const res = await this.call("/v1/annotation/submit", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (res.status === 409) return { kind: "duplicate" };
    if (res.status === 400) {
      const detail = (await res.json()) as { error: string; field: string };
      return { kind: "invalid", field: detail.field, error: detail.error };
    }
    if (!res.ok) throw new NetworkError(`submit failed: HTTP ${res.status}`);
    const payload = (await res.json()) as { final: FinalLabel | null };
    return { kind: "accepted", final: payload.final };
  }

  async progress(): Promise<Progress> {
    const res = await this.call("/v1/annotation/progress");
    if (!res.ok) throw new NetworkError(`progress failed: HTTP ${res.status}`);
    return (await res.json()) as Progress;
  }
}

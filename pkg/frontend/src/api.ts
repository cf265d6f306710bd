/** Typed client for the planning service; all numbers come from the server. */

import type {
  AlterationResponse,
  BoundEvent,
  CompareResponse,
  ScenarioResponse,
  SessionResponse,
  SimilarityResponse,
} from "./types.js";

export interface BoundsSubscription {
  onBound: (event: BoundEvent) => void;
  onDone: (bounds: Array<number | null>) => void;
  onError: (message: string) => void;
}

export interface ProximityResponse {
  proximity: number;
  progress: number;
}

/** The surface the panels talk to; tests provide recorded implementations. */
export interface CasemixApi {
  getScenario(): Promise<ScenarioResponse>;
  getSession(): Promise<SessionResponse>;
  streamBounds(subscription: BoundsSubscription): Promise<void>;
  alterType(type: string, delta: number, method: string): Promise<AlterationResponse>;
  decide(entryIndex: number, decision: "accepted" | "rejected"): Promise<SessionResponse>;
  compare(
    a: number[],
    b: number[],
    eps?: number[],
    subset?: string[],
  ): Promise<CompareResponse>;
  similarity(a: number[], b: number[], eps?: number[]): Promise<SimilarityResponse>;
  proximity(mix: number[]): Promise<ProximityResponse>;
}

async function asJson<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    const message = body?.error?.message ?? `request failed (${response.status})`;
    throw new Error(message);
  }
  return body as T;
}

export class HttpApi implements CasemixApi {
  constructor(private readonly base: string = "") {}

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const response = await fetch(`${this.base}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    return asJson<T>(response);
  }

  getScenario(): Promise<ScenarioResponse> {
    return fetch(`${this.base}/api/scenario`).then((r) => asJson<ScenarioResponse>(r));
  }

  getSession(): Promise<SessionResponse> {
    return fetch(`${this.base}/api/session`).then((r) => asJson<SessionResponse>(r));
  }

  async streamBounds(subscription: BoundsSubscription): Promise<void> {
    let response: Response;
    try {
      response = await fetch(`${this.base}/api/bounds`);
    } catch (err) {
      subscription.onError(String(err));
      return;
    }
    if (!response.ok || !response.body) {
      subscription.onError(`bounds stream failed (${response.status})`);
      return;
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    try {
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break;
        buffer += decoder.decode(value, { stream: true });
        let cut;
        while ((cut = buffer.indexOf("\n\n")) >= 0) {
          const frame = buffer.slice(0, cut);
          buffer = buffer.slice(cut + 2);
          this.dispatchFrame(frame, subscription);
        }
      }
    } catch (err) {
      subscription.onError(String(err));
    }
  }

  private dispatchFrame(frame: string, subscription: BoundsSubscription): void {
    let event = "message";
    let data = "";
    for (const line of frame.split("\n")) {
      if (line.startsWith("event:")) event = line.slice(6).trim();
      if (line.startsWith("data:")) data = line.slice(5).trim();
    }
    if (!data) return;
    if (event === "bound") subscription.onBound(JSON.parse(data));
    if (event === "done") subscription.onDone(JSON.parse(data).bounds);
  }

  alterType(type: string, delta: number, method: string): Promise<AlterationResponse> {
    return this.post<AlterationResponse>("/api/alter", { type, delta, method });
  }

  decide(entryIndex: number, decision: "accepted" | "rejected"): Promise<SessionResponse> {
    return this.post<SessionResponse>("/api/decision", {
      entry_index: entryIndex,
      decision,
    });
  }

  compare(a: number[], b: number[], eps?: number[], subset?: string[]): Promise<CompareResponse> {
    return this.post<CompareResponse>("/api/compare", { a, b, eps, subset });
  }

  similarity(a: number[], b: number[], eps?: number[]): Promise<SimilarityResponse> {
    return this.post<SimilarityResponse>("/api/similarity", { a, b, eps });
  }

  proximity(mix: number[]): Promise<ProximityResponse> {
    return this.post<ProximityResponse>("/api/proximity", { mix });
  }
}

/** Recorded service payloads for contract tests (no live solver involved). */

import type { BoundsSubscription, CasemixApi, ProximityResponse } from "../src/api.js";
import type {
  AlterationResponse,
  BoundEvent,
  CompareResponse,
  ScenarioResponse,
  SessionResponse,
  SimilarityResponse,
} from "../src/types.js";

export const TYPE_IDS = ["T1", "T2", "T3", "T4", "T5"];

export const BASELINE = [5.68, 48.82, 20.43, 10.22, 28.38];

export const BOUND_EVENTS: BoundEvent[] = [
  { index: 0, type: "T1", bound: 25.184, total_types: 5 },
  { index: 1, type: "T2", bound: 89.792, total_types: 5 },
  { index: 2, type: "T3", bound: 65.477, total_types: 5 },
  { index: 3, type: "T4", bound: 105.047, total_types: 5 },
  { index: 4, type: "T5", bound: 70.0, total_types: 5 },
];

/** T5 dragged from the baseline to 32 under the squared policy. */
export const ALTER_T5_32_SSQ: AlterationResponse = {
  status: "ok",
  method: "ssq",
  new_mix: [5.63, 48.28, 18.78, 9.23, 32.0],
  new_sub_mix: [[3.94, 1.69], [48.28], [4.7, 7.51, 6.57], [9.23], [32.0]],
  deviations: [0.002, 0.006, 0.0159, 0.0094, 0.0],
  uniform_deviation: null,
  objective_value: 0.0004,
  total: 113.92,
  total_impact: -3.23,
  utilization: {
    OT: { hours_used: 400.0, capacity: 400.0, percent: 100.0 },
  },
  approximate: false,
  message: "",
  entry_index: 0,
};

export const COMPARE_FIVE: CompareResponse = {
  deltas: [0.428, 0.2545, -0.132, 0.0035, -0.057],
  gain_vector: [0.428, 0.2545, 0, 0.0035, 0],
  loss_vector: [0, 0, 0.132, 0, 0.057],
  gain: 0.498,
  loss: 0.144,
  ratio: 3.465,
  verdict: "b_preferred",
  significant: false,
  subset: null,
};

export const SIMILARITY_FIVE: SimilarityResponse = {
  per_type_significant: [true, true, true, false, false],
  significant_types: ["T1", "T2", "T3"],
  los: 40.0,
  lod: 60.0,
  similar_overall: false,
  eps: [2.5, 9.6, 5.1, 0.5, 7.0],
};

export const SESSION: SessionResponse = {
  id: "main",
  baseline_mix: BASELINE,
  current_mix: BASELINE,
  history: [],
};

export const SCENARIO: ScenarioResponse = {
  scenario: {
    name: "demo-week",
    periods: 1,
    patient_types: TYPE_IDS.map((id) => ({ id, mix_fraction: 0.2 })),
    zones: [{ id: "OT", kind: "theatre", beds: 10 }],
  },
  fingerprint: "demo",
  type_bounds: [25.184, 89.792, 65.477, 105.047, 70.0],
};

/** Scripted API double: bounds events are emitted by the test, one at a time. */
export class MockApi implements CasemixApi {
  alterCalls: Array<{ type: string; delta: number; method: string }> = [];
  decideCalls: Array<{ entryIndex: number; decision: string }> = [];
  compareCalls: Array<{ a: number[]; b: number[]; eps?: number[]; subset?: string[] }> = [];
  alterResponse: AlterationResponse = ALTER_T5_32_SSQ;
  alterError: string | null = null;
  compareResponse: CompareResponse = COMPARE_FIVE;
  similarityResponse: SimilarityResponse = SIMILARITY_FIVE;

  private subscription: BoundsSubscription | null = null;
  private streamDone: (() => void) | null = null;

  getScenario(): Promise<ScenarioResponse> {
    return Promise.resolve(SCENARIO);
  }

  getSession(): Promise<SessionResponse> {
    return Promise.resolve(SESSION);
  }

  streamBounds(subscription: BoundsSubscription): Promise<void> {
    this.subscription = subscription;
    return new Promise((resolve) => {
      this.streamDone = resolve;
    });
  }

  emitBound(event: BoundEvent): void {
    this.subscription?.onBound(event);
  }

  emitDone(bounds: Array<number | null>): void {
    this.subscription?.onDone(bounds);
    this.streamDone?.();
  }

  emitError(message: string): void {
    this.subscription?.onError(message);
    this.streamDone?.();
  }

  alterType(type: string, delta: number, method: string): Promise<AlterationResponse> {
    this.alterCalls.push({ type, delta, method });
    if (this.alterError) return Promise.reject(new Error(this.alterError));
    return Promise.resolve(this.alterResponse);
  }

  decide(entryIndex: number, decision: "accepted" | "rejected"): Promise<SessionResponse> {
    this.decideCalls.push({ entryIndex, decision });
    return Promise.resolve(SESSION);
  }

  compare(a: number[], b: number[], eps?: number[], subset?: string[]): Promise<CompareResponse> {
    this.compareCalls.push({ a, b, eps, subset });
    return Promise.resolve(this.compareResponse);
  }

  similarity(a: number[], b: number[], eps?: number[]): Promise<SimilarityResponse> {
    return Promise.resolve(this.similarityResponse);
  }

  proximityByMix = new Map<string, ProximityResponse>();

  proximity(mix: number[]): Promise<ProximityResponse> {
    const recorded = this.proximityByMix.get(JSON.stringify(mix));
    return Promise.resolve(recorded ?? { proximity: 55.0, progress: 45.0 });
  }
}

/** Payload shapes of the planning service API (mirrors the HTTP contract). */

export interface ZoneUtilization {
  hours_used: number;
  capacity: number;
  percent: number | null;
}

export interface ScenarioDoc {
  name: string;
  periods: number;
  patient_types: Array<{ id: string; mix_fraction: number }>;
  zones: Array<{ id: string; kind: string; beds: number }>;
}

export interface ScenarioResponse {
  scenario: ScenarioDoc;
  fingerprint: string;
  type_bounds: Array<number | null> | null;
}

export interface BoundEvent {
  index: number;
  type: string;
  bound: number | null;
  total_types: number;
}

export interface AlterationResponse {
  status: string;
  method: string;
  new_mix: number[];
  new_sub_mix: number[][];
  deviations: number[];
  uniform_deviation: number | null;
  objective_value: number | null;
  total: number | null;
  total_impact: number | null;
  utilization: Record<string, ZoneUtilization>;
  approximate: boolean;
  message: string;
  entry_index: number;
}

export interface SessionResponse {
  id: string;
  baseline_mix: number[];
  current_mix: number[];
  history: Array<{
    target_type: string | null;
    target_subtype: string | null;
    delta: number;
    method: string;
    decision: string;
  }>;
}

export interface CompareResponse {
  deltas: number[];
  gain_vector: number[];
  loss_vector: number[];
  gain: number;
  loss: number;
  ratio: number | null;
  verdict: "a_preferred" | "b_preferred" | "equivalent";
  significant: boolean;
  subset: string[] | null;
}

export interface SimilarityResponse {
  per_type_significant: boolean[];
  significant_types: string[];
  los: number;
  lod: number;
  similar_overall: boolean;
  eps: number[];
}

export interface ApiError {
  error: { code: string; message: string };
}

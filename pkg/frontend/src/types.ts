// Mirrors of the advisor service's JSON shapes. Every number shown in the
// UI comes straight out of these; the client never computes statistics.

export interface RankingRow {
  material_index: number;
  label: string;
  mean: number;
  sd: number;
  best: boolean;
}

export interface BeliefView {
  theta: number[];
  sigma_mat: number[];
  noise_var: number;
  n: number;
}

export interface DesignView {
  z_index: number;
  v_index: number;
  z: number[];
  v: number[];
}

export interface RecommendationView {
  design: DesignView;
  ei_value: number;
  ranking: RankingRow[];
}

export interface SessionEvent {
  ts: number;
  event: string;
  [key: string]: unknown;
}

export interface SessionView {
  session_id: string;
  policy: string;
  track: string;
  noise_var: number;
  tau: number;
  materials: number[][];
  stresses: number[][];
  target_stress: number[];
  material_labels: string[];
  belief: BeliefView;
  ranking: RankingRow[];
  best_index: number;
  outstanding: RecommendationView | null;
  events: SessionEvent[];
}

export interface ObservationResult {
  censored: boolean;
  best_index: number;
  ranking: RankingRow[];
  belief: BeliefView;
}

export interface ExportView {
  session_id: string;
  events: SessionEvent[];
}

export interface CreateSessionRequest {
  materials: number[][];
  stresses: number[][];
  target_stress: number[];
  noise_var: number;
  tau: number;
  material_labels: string[];
  policy: string;
  track: string;
  seed: number;
  schedule_length?: number;
}

export interface ObservationRequest {
  lifetime: number | null;
  tau: number;
}

/** Raw wizard state: strings exactly as typed, parsed at validation time. */
export interface MaterialRowInput {
  label: string;
  encoding: string;
}

export interface SetupFormInput {
  materials: MaterialRowInput[];
  stresses: string[];
  targetStress: string;
  noiseVar: string;
  tau: string;
  policy: string;
  track: string;
  scheduleLength: string;
  seed: string;
}

export interface ObservationInput {
  mode: "failure" | "censored";
  lifetime: string;
  tau: string;
}

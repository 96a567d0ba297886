import type {
  CreateSessionRequest,
  ExportView,
  ObservationRequest,
  ObservationResult,
  RecommendationView,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : `request failed (${status})`);
  }

  /** Field -> message map for 400 validation failures, if present. */
  fieldErrors(): Record<string, string> | null {
    const d = this.detail as { errors?: Record<string, string> } | null;
    return d && typeof d === "object" && d.errors ? d.errors : null;
  }
}

export interface AdvisorClient {
  createSession(body: CreateSessionRequest): Promise<SessionView>;
  getSession(id: string): Promise<SessionView>;
  getRecommendation(id: string): Promise<RecommendationView>;
  voidRecommendation(id: string): Promise<SessionView>;
  postObservation(id: string, body: ObservationRequest): Promise<ObservationResult>;
  exportSession(id: string): Promise<ExportView>;
}

export function makeClient(
  base = "",
  fetchFn: typeof fetch = (...args) => fetch(...args),
): AdvisorClient {
  async function request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await fetchFn(`${base}${path}`, init);
    const text = await response.text();
    const json = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(response.status, json ? json.detail : null);
    }
    return json as T;
  }

  return {
    createSession: (body) => request("POST", "/sessions", body),
    getSession: (id) => request("GET", `/sessions/${id}`),
    getRecommendation: (id) => request("GET", `/sessions/${id}/recommendation`),
    voidRecommendation: (id) => request("DELETE", `/sessions/${id}/recommendation`),
    postObservation: (id, body) => request("POST", `/sessions/${id}/observations`, body),
    exportSession: (id) => request("GET", `/sessions/${id}/export`),
  };
}

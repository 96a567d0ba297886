import type {
  CreateSessionRequest,
  ObservationInput,
  ObservationRequest,
  SetupFormInput,
} from "./types.js";
import { parseVector } from "./validate.js";

function mustVector(text: string, what: string): number[] {
  const v = parseVector(text);
  if (v === null) throw new Error(`unparseable ${what}: ${JSON.stringify(text)}`);
  return v;
}

/** Build the POST /sessions body. Call only after validateSetup passes. */
export function toCreateRequest(form: SetupFormInput): CreateSessionRequest {
  const body: CreateSessionRequest = {
    materials: form.materials.map((m) => mustVector(m.encoding, "material encoding")),
    stresses: form.stresses.map((s) => mustVector(s, "stress row")),
    target_stress: mustVector(form.targetStress, "target stress"),
    noise_var: Number(form.noiseVar),
    tau: Number(form.tau),
    material_labels: form.materials.map((m) => m.label.trim()),
    policy: form.policy,
    track: form.track,
    seed: form.seed.trim() === "" ? 0 : Number(form.seed),
  };
  if (form.policy === "factorial") {
    body.schedule_length = Number(form.scheduleLength);
  }
  return body;
}

export function toObservationRequest(entry: ObservationInput): ObservationRequest {
  return {
    lifetime: entry.mode === "censored" ? null : Number(entry.lifetime),
    tau: Number(entry.tau),
  };
}

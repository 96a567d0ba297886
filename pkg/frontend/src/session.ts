import type { AdvisorClient } from "./api.js";
import { ApiError } from "./api.js";
import { toObservationRequest } from "./payload.js";
import {
  clear,
  renderEvents,
  renderRanking,
  renderRecommendation,
  showBanner,
  showFieldErrors,
} from "./render.js";
import type { ObservationInput, RecommendationView, SessionView } from "./types.js";
import { validateObservation } from "./validate.js";

export type DownloadFn = (filename: string, text: string) => void;

function browserDownload(filename: string, text: string): void {
  const blob = new Blob([text], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}

export class SessionPage {
  private readonly banner: HTMLElement;
  private readonly recBox: HTMLElement;
  private readonly obsForm: HTMLFormElement;
  private readonly lifetime: HTMLInputElement;
  private readonly tauInput: HTMLInputElement;
  private readonly note: HTMLElement;
  private readonly recordButton: HTMLButtonElement;
  private view: SessionView | null = null;

  constructor(
    private readonly root: ParentNode,
    private readonly client: AdvisorClient,
    private readonly sessionId: string,
    private readonly download: DownloadFn = browserDownload,
  ) {
    this.banner = root.querySelector("#session-banner") as HTMLElement;
    this.recBox = root.querySelector("#recommendation") as HTMLElement;
    this.obsForm = root.querySelector("#observation-form") as HTMLFormElement;
    this.lifetime = root.querySelector("#lifetime") as HTMLInputElement;
    this.tauInput = root.querySelector("#obs-tau") as HTMLInputElement;
    this.note = root.querySelector("#observation-note") as HTMLElement;
    this.recordButton = root.querySelector("#record-button") as HTMLButtonElement;

    this.obsForm.addEventListener("submit", (e) => {
      e.preventDefault();
      void this.record();
    });
    this.obsForm.addEventListener("input", () => this.syncForm());
    for (const radio of this.obsForm.querySelectorAll('input[name="mode"]')) {
      radio.addEventListener("change", () => this.syncForm());
    }
    (root.querySelector("#void-button") as HTMLButtonElement).addEventListener(
      "click", () => void this.voidRecommendation());
    (root.querySelector("#export-button") as HTMLButtonElement).addEventListener(
      "click", () => void this.exportLog());
  }

  mode(): "failure" | "censored" {
    const checked = this.obsForm.querySelector(
      'input[name="mode"]:checked',
    ) as HTMLInputElement | null;
    return checked?.value === "censored" ? "censored" : "failure";
  }

  private entry(): ObservationInput {
    return {
      mode: this.mode(),
      lifetime: this.lifetime.value,
      tau: this.tauInput.value,
    };
  }

  private syncForm(): void {
    this.lifetime.disabled = this.mode() === "censored";
    showFieldErrors(this.obsForm, validateObservation(this.entry()));
  }

  async load(focusForm = false): Promise<void> {
    const view = await this.client.getSession(this.sessionId);
    this.view = view;
    const idSlot = this.root.querySelector("#session-id") as HTMLElement;
    idSlot.textContent = view.session_id;
    const meta = this.root.querySelector("#session-meta") as HTMLElement;
    meta.textContent =
      `policy ${view.policy} / ${view.track}, noise var ${view.noise_var}, ` +
      `default tau ${view.tau}, target stress (${view.target_stress.join(", ")})`;
    renderRanking(
      this.root.querySelector("#ranking-body") as HTMLElement, view.ranking);
    renderEvents(
      this.root.querySelector("#event-list") as HTMLElement, view.events);
    if (this.tauInput.value.trim() === "") {
      this.tauInput.value = String(view.tau);
    }

    let rec = view.outstanding;
    if (rec === null) {
      try {
        rec = await this.client.getRecommendation(this.sessionId);
      } catch (error) {
        if (error instanceof ApiError && error.status === 409) {
          this.renderExhausted(String(error.detail ?? "no further runs"));
          return;
        }
        throw error;
      }
      renderRanking(
        this.root.querySelector("#ranking-body") as HTMLElement, rec.ranking);
    }
    this.renderRecommendation(rec);
    if (focusForm) this.lifetime.focus();
  }

  private renderRecommendation(rec: RecommendationView): void {
    renderRecommendation(this.recBox, rec, this.view?.material_labels ?? []);
    this.recordButton.disabled = false;
  }

  private renderExhausted(message: string): void {
    clear(this.recBox);
    const p = document.createElement("p");
    p.className = "rec-exhausted";
    p.textContent = message;
    this.recBox.appendChild(p);
    this.recordButton.disabled = true;
  }

  async record(): Promise<void> {
    const entry = this.entry();
    const errors = validateObservation(entry);
    showFieldErrors(this.obsForm, errors);
    if (Object.keys(errors).length > 0) return;
    showBanner(this.banner, null);
    try {
      const result = await this.client.postObservation(
        this.sessionId, toObservationRequest(entry));
      this.note.textContent = result.censored
        ? "Recorded: run censored at tau."
        : "Recorded: failure observed.";
      this.lifetime.value = "";
      this.tauInput.value = "";
      await this.load(true);
    } catch (error) {
      if (error instanceof ApiError && (error.status === 409 || error.status === 422)) {
        showBanner(this.banner, String(error.detail));
        if (error.status === 409) await this.load();
      } else {
        showBanner(this.banner, "recording failed; the service may be down");
      }
    }
  }

  async voidRecommendation(): Promise<void> {
    try {
      await this.client.voidRecommendation(this.sessionId);
      this.note.textContent = "Recommendation voided.";
      await this.load();
    } catch (error) {
      if (error instanceof ApiError) {
        showBanner(this.banner, String(error.detail));
      }
    }
  }

  async exportLog(): Promise<void> {
    const doc = await this.client.exportSession(this.sessionId);
    this.download(
      `session-${doc.session_id}.json`, JSON.stringify(doc, null, 2));
  }
}

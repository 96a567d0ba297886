import type { AdvisorClient } from "./api.js";
import { ApiError } from "./api.js";
import { toCreateRequest } from "./payload.js";
import { showBanner, showFieldErrors } from "./render.js";
import type { SessionView, SetupFormInput } from "./types.js";
import { validateSetup } from "./validate.js";

function textInput(className: string, placeholder: string, value = ""): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "text";
  input.className = className;
  input.placeholder = placeholder;
  input.value = value;
  return input;
}

export class Wizard {
  private readonly form: HTMLFormElement;
  private readonly materialRows: HTMLElement;
  private readonly stressRows: HTMLElement;
  private readonly submit: HTMLButtonElement;
  private readonly banner: HTMLElement;

  constructor(
    root: ParentNode,
    private readonly client: AdvisorClient,
    private readonly onCreated: (view: SessionView) => void,
  ) {
    this.form = root.querySelector("#setup-form") as HTMLFormElement;
    this.materialRows = root.querySelector("#material-rows") as HTMLElement;
    this.stressRows = root.querySelector("#stress-rows") as HTMLElement;
    this.submit = root.querySelector("#create-button") as HTMLButtonElement;
    this.banner = root.querySelector("#error-banner") as HTMLElement;

    (root.querySelector("#add-material") as HTMLButtonElement).addEventListener(
      "click", () => this.addMaterialRow());
    (root.querySelector("#add-stress") as HTMLButtonElement).addEventListener(
      "click", () => this.addStressRow());
    this.form.addEventListener("input", () => this.refresh());
    this.form.addEventListener("submit", (e) => {
      e.preventDefault();
      void this.create();
    });
    (this.form.querySelector("#policy") as HTMLSelectElement).addEventListener(
      "change", () => this.toggleSchedule());

    this.addMaterialRow();
    this.addMaterialRow();
    this.addStressRow();
    this.toggleSchedule();
    this.refresh();
  }

  addMaterialRow(label = "", encoding = ""): void {
    const row = document.createElement("div");
    row.className = "material-row form-row";
    row.appendChild(textInput("material-label", "name (e.g. alloy-A)", label));
    row.appendChild(textInput("material-encoding", "encoding (e.g. 0)", encoding));
    row.appendChild(this.removeButton(row));
    this.materialRows.appendChild(row);
    this.refresh();
  }

  addStressRow(value = ""): void {
    const row = document.createElement("div");
    row.className = "stress-row form-row";
    row.appendChild(textInput("stress-encoding", "levels (e.g. 0.5, 1.0)", value));
    row.appendChild(this.removeButton(row));
    this.stressRows.appendChild(row);
    this.refresh();
  }

  private removeButton(row: HTMLElement): HTMLButtonElement {
    const button = document.createElement("button");
    button.type = "button";
    button.className = "remove-row";
    button.textContent = "remove";
    button.addEventListener("click", () => {
      row.remove();
      this.refresh();
    });
    return button;
  }

  private toggleSchedule(): void {
    const policy = (this.form.querySelector("#policy") as HTMLSelectElement).value;
    const row = this.form.querySelector("#schedule-length-row") as HTMLElement;
    row.hidden = policy !== "factorial";
    this.refresh();
  }

  readForm(): SetupFormInput {
    const val = (sel: string) =>
      (this.form.querySelector(sel) as HTMLInputElement | HTMLSelectElement).value;
    return {
      materials: Array.from(
        this.materialRows.querySelectorAll(".material-row"),
      ).map((row) => ({
        label: (row.querySelector(".material-label") as HTMLInputElement).value,
        encoding: (row.querySelector(".material-encoding") as HTMLInputElement).value,
      })),
      stresses: Array.from(
        this.stressRows.querySelectorAll(".stress-encoding"),
      ).map((input) => (input as HTMLInputElement).value),
      targetStress: val("#target-stress"),
      noiseVar: val("#noise-var"),
      tau: val("#tau"),
      policy: val("#policy"),
      track: val("#track"),
      scheduleLength: val("#schedule-length"),
      seed: val("#seed"),
    };
  }

  refresh(): void {
    const errors = validateSetup(this.readForm());
    showFieldErrors(this.form, errors);
    this.submit.disabled = Object.keys(errors).length > 0;
  }

  async create(): Promise<void> {
    const form = this.readForm();
    const errors = validateSetup(form);
    if (Object.keys(errors).length > 0) {
      showFieldErrors(this.form, errors);
      return;
    }
    showBanner(this.banner, null);
    try {
      const view = await this.client.createSession(toCreateRequest(form));
      this.onCreated(view);
    } catch (error) {
      if (error instanceof ApiError) {
        const fields = error.fieldErrors();
        if (fields) {
          showFieldErrors(this.form, fields);
          showBanner(
            this.banner,
            Object.entries(fields)
              .map(([field, msg]) => `${field}: ${msg}`)
              .join("; "),
          );
        } else {
          showBanner(this.banner, String(error.detail ?? error.message));
        }
      } else {
        showBanner(this.banner, "service unreachable; is the advisor running?");
      }
    }
  }
}

import { ApiError } from "./api.js";
import { toObservationRequest } from "./payload.js";
import { clear, renderEvents, renderRanking, renderRecommendation, showBanner, showFieldErrors, } from "./render.js";
import { validateObservation } from "./validate.js";
function browserDownload(filename, text) {
    const blob = new Blob([text], { type: "application/json" });
    const url = URL.createObjectURL(blob);
    const a = document.createElement("a");
    a.href = url;
    a.download = filename;
    a.click();
    URL.revokeObjectURL(url);
}
export class SessionPage {
    constructor(root, client, sessionId, download = browserDownload) {
        this.root = root;
        this.client = client;
        this.sessionId = sessionId;
        this.download = download;
        this.view = null;
        this.banner = root.querySelector("#session-banner");
        this.recBox = root.querySelector("#recommendation");
        this.obsForm = root.querySelector("#observation-form");
        this.lifetime = root.querySelector("#lifetime");
        this.tauInput = root.querySelector("#obs-tau");
        this.note = root.querySelector("#observation-note");
        this.recordButton = root.querySelector("#record-button");
        this.obsForm.addEventListener("submit", (e) => {
            e.preventDefault();
            void this.record();
        });
        this.obsForm.addEventListener("input", () => this.syncForm());
        for (const radio of this.obsForm.querySelectorAll('input[name="mode"]')) {
            radio.addEventListener("change", () => this.syncForm());
        }
        root.querySelector("#void-button").addEventListener("click", () => void this.voidRecommendation());
        root.querySelector("#export-button").addEventListener("click", () => void this.exportLog());
    }
    mode() {
        const checked = this.obsForm.querySelector('input[name="mode"]:checked');
        return checked?.value === "censored" ? "censored" : "failure";
    }
    entry() {
        return {
            mode: this.mode(),
            lifetime: this.lifetime.value,
            tau: this.tauInput.value,
        };
    }
    syncForm() {
        this.lifetime.disabled = this.mode() === "censored";
        showFieldErrors(this.obsForm, validateObservation(this.entry()));
    }
    async load(focusForm = false) {
        const view = await this.client.getSession(this.sessionId);
        this.view = view;
        const idSlot = this.root.querySelector("#session-id");
        idSlot.textContent = view.session_id;
        const meta = this.root.querySelector("#session-meta");
        meta.textContent =
            `policy ${view.policy} / ${view.track}, noise var ${view.noise_var}, ` +
                `default tau ${view.tau}, target stress (${view.target_stress.join(", ")})`;
        renderRanking(this.root.querySelector("#ranking-body"), view.ranking);
        renderEvents(this.root.querySelector("#event-list"), view.events);
        if (this.tauInput.value.trim() === "") {
            this.tauInput.value = String(view.tau);
        }
        let rec = view.outstanding;
        if (rec === null) {
            try {
                rec = await this.client.getRecommendation(this.sessionId);
            }
            catch (error) {
                if (error instanceof ApiError && error.status === 409) {
                    this.renderExhausted(String(error.detail ?? "no further runs"));
                    return;
                }
                throw error;
            }
            renderRanking(this.root.querySelector("#ranking-body"), rec.ranking);
        }
        this.renderRecommendation(rec);
        if (focusForm)
            this.lifetime.focus();
    }
    renderRecommendation(rec) {
        renderRecommendation(this.recBox, rec, this.view?.material_labels ?? []);
        this.recordButton.disabled = false;
    }
    renderExhausted(message) {
        clear(this.recBox);
        const p = document.createElement("p");
        p.className = "rec-exhausted";
        p.textContent = message;
        this.recBox.appendChild(p);
        this.recordButton.disabled = true;
    }
    async record() {
        const entry = this.entry();
        const errors = validateObservation(entry);
        showFieldErrors(this.obsForm, errors);
        if (Object.keys(errors).length > 0)
            return;
        showBanner(this.banner, null);
        try {
            const result = await this.client.postObservation(this.sessionId, toObservationRequest(entry));
            this.note.textContent = result.censored
                ? "Recorded: run censored at tau."
                : "Recorded: failure observed.";
            this.lifetime.value = "";
            this.tauInput.value = "";
            await this.load(true);
        }
        catch (error) {
            if (error instanceof ApiError && (error.status === 409 || error.status === 422)) {
                showBanner(this.banner, String(error.detail));
                if (error.status === 409)
                    await this.load();
            }
            else {
                showBanner(this.banner, "recording failed; the service may be down");
            }
        }
    }
    async voidRecommendation() {
        try {
            await this.client.voidRecommendation(this.sessionId);
            this.note.textContent = "Recommendation voided.";
            await this.load();
        }
        catch (error) {
            if (error instanceof ApiError) {
                showBanner(this.banner, String(error.detail));
            }
        }
    }
    async exportLog() {
        const doc = await this.client.exportSession(this.sessionId);
        this.download(`session-${doc.session_id}.json`, JSON.stringify(doc, null, 2));
    }
}

import type {
  RankingRow,
  RecommendationView,
  SessionEvent,
} from "./types.js";

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return String(x);
  const abs = Math.abs(x);
  if (abs !== 0 && (abs >= 1e4 || abs < 1e-3)) return x.toExponential(3);
  return x.toFixed(4);
}

export function clear(el: HTMLElement): void {
  while (el.firstChild) el.removeChild(el.firstChild);
}

/**
 * Ranking table in the exact order the service returned. Each mean/sd cell
 * carries the verbatim response value in data-exact; the bar spans
 * mean +/- 2 sd on a shared presentational scale.
 */
export function renderRanking(container: HTMLElement, rows: RankingRow[]): void {
  clear(container);
  if (rows.length === 0) return;
  const lo = Math.min(...rows.map((r) => r.mean - 2 * r.sd));
  const hi = Math.max(...rows.map((r) => r.mean + 2 * r.sd));
  const span = hi - lo || 1;
  for (const row of rows) {
    const tr = document.createElement("tr");
    tr.className = row.best ? "ranking-row best" : "ranking-row";

    const label = document.createElement("td");
    label.className = "ranking-label";
    label.textContent = row.best ? `${row.label} ★` : row.label;
    tr.appendChild(label);

    const mean = document.createElement("td");
    mean.className = "num";
    mean.dataset.exact = String(row.mean);
    mean.textContent = fmt(row.mean);
    tr.appendChild(mean);

    const sd = document.createElement("td");
    sd.className = "num";
    sd.dataset.exact = String(row.sd);
    sd.textContent = fmt(row.sd);
    tr.appendChild(sd);

    const barCell = document.createElement("td");
    barCell.className = "bar-cell";
    const bar = document.createElement("div");
    bar.className = "bar";
    const left = ((row.mean - 2 * row.sd - lo) / span) * 100;
    const width = ((4 * row.sd) / span) * 100;
    bar.style.left = `${left.toFixed(2)}%`;
    bar.style.width = `${Math.max(width, 0.5).toFixed(2)}%`;
    bar.title = `${fmt(row.mean)} ± 2·${fmt(row.sd)}`;
    const tick = document.createElement("div");
    tick.className = "bar-tick";
    tick.style.left = `${(((row.mean - lo) / span) * 100).toFixed(2)}%`;
    barCell.appendChild(bar);
    barCell.appendChild(tick);
    tr.appendChild(barCell);

    container.appendChild(tr);
  }
}

export function renderRecommendation(
  container: HTMLElement,
  rec: RecommendationView,
  labels: string[],
): void {
  clear(container);
  const material = document.createElement("p");
  material.className = "rec-material";
  material.textContent = labels[rec.design.z_index] ?? `material ${rec.design.z_index}`;
  container.appendChild(material);

  const stress = document.createElement("p");
  stress.className = "rec-stress";
  stress.textContent = `stress (${rec.design.v.map(fmt).join(", ")})`;
  container.appendChild(stress);

  const ei = document.createElement("p");
  ei.className = "rec-ei";
  ei.dataset.exact = String(rec.ei_value);
  ei.textContent = `expected improvement ${fmt(rec.ei_value)}`;
  container.appendChild(ei);
}

function describeEvent(event: SessionEvent): string {
  switch (event.event) {
    case "created":
      return "session created";
    case "recommended":
      return `recommended material ${event.z_index}, stress cell ${event.v_index}`;
    case "observed":
      return event.lifetime === null
        ? `censored at tau = ${event.tau}`
        : `failure at t = ${event.lifetime}`;
    case "decided":
      return `current best: material ${event.best_index}`;
    case "voided":
      return "recommendation voided";
    default:
      return event.event;
  }
}

export function renderEvents(list: HTMLElement, events: SessionEvent[]): void {
  clear(list);
  for (const event of events) {
    const li = document.createElement("li");
    li.className = `event event-${event.event}`;
    li.textContent = describeEvent(event);
    list.appendChild(li);
  }
}

export function showBanner(el: HTMLElement, message: string | null): void {
  el.textContent = message ?? "";
  el.hidden = message === null;
}

/** Inline field errors: spans with data-field inside the form. */
export function showFieldErrors(
  form: HTMLElement,
  errors: Record<string, string>,
): void {
  for (const slot of form.querySelectorAll<HTMLElement>("[data-field]")) {
    const field = slot.dataset.field as string;
    slot.textContent = errors[field] ?? "";
  }
}

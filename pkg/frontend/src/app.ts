// DOM wiring: create a session, poll it, render cards/heatmap/history,
// submit selections, export the run log.

import { ApiClient, ApiError, type Alternative } from "./api.js";
import { drawHeatmap, floorplanSvg } from "./render.js";
import {
  canExport,
  canResample,
  canSelect,
  initialState,
  onAlternatives,
  onError,
  onHandle,
  onSessionCreated,
  onSubmit,
  onSubmitAccepted,
  pollDelayMs,
  type UiState,
} from "./state.js";

const api = new ApiClient("");
let state: UiState = initialState();
let pollTimer: number | undefined;
let archiveWhich: "feasible" | "infeasible" = "feasible";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatusLine(): void {
  const line = el<HTMLElement>("status-line");
  const bits = [`status: ${state.status}`];
  if (state.selections > 0) bits.push(`selections: ${state.selections}`);
  if (state.error) bits.push(`error: ${state.error}`);
  line.textContent = bits.join("  ·  ");
  el<HTMLButtonElement>("export-btn").disabled = !canExport(state);
  el<HTMLSelectElement>("das-select").disabled = !canResample(state);
  el<HTMLButtonElement>("start-btn").disabled =
    state.status === "initializing" || state.status === "evolving";
}

function renderAlternatives(): void {
  const grid = el<HTMLElement>("cards");
  grid.innerHTML = "";
  const selectable = canSelect(state);
  for (const alt of state.alternatives) {
    const card = document.createElement("div");
    card.className = "card";
    if (alt.geometry && alt.geometry.rooms.length > 0) {
      card.innerHTML = floorplanSvg(alt.geometry, 220);
    } else {
      card.innerHTML = `<div class="card-missing">geometry unavailable<br>${alt.alt_id}</div>`;
    }
    const caption = document.createElement("div");
    caption.className = "card-caption";
    caption.textContent =
      `fit ${alt.fitness.toFixed(3)} · ` +
      `bc (${alt.bc[0].toFixed(3)}, ${alt.bc[1].toFixed(3)})`;
    card.appendChild(caption);
    if (selectable) {
      card.classList.add("selectable");
      card.addEventListener("click", () => submit(alt));
    }
    grid.appendChild(card);
  }
}

async function submit(alt: Alternative): Promise<void> {
  if (!canSelect(state)) return;
  try {
    state = onSubmit(state);
    setStatusLine();
    await api.submitSelection(state.sessionId!, alt.alt_id);
    state = onSubmitAccepted(state);
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      // raced a state change; the next poll resolves it
      state = { ...state, submitting: false };
    } else {
      state = onError(state, String(err));
    }
  }
  renderAlternatives();
  setStatusLine();
  schedulePoll(100);
}

async function refreshArchive(): Promise<void> {
  if (!state.sessionId || state.status === "initializing") return;
  try {
    const view = await api.getArchive(state.sessionId, archiveWhich);
    drawHeatmap(el<HTMLCanvasElement>("heatmap"), view);
    el<HTMLElement>("heatmap-meta").textContent =
      `${view.which} · coverage ${(view.coverage * 100).toFixed(2)}% · ` +
      `evals ${view.evals_done}`;
  } catch {
    // view not ready yet; fine
  }
}

async function refreshHistory(): Promise<void> {
  const sid = state.sessionId;
  if (!sid) return;
  const history = await api.getHistory(sid);
  const strip = el<HTMLElement>("history");
  strip.innerHTML = "";
  for (const entry of history) {
    const item = document.createElement("div");
    item.className = "history-item";
    item.innerHTML = floorplanSvg(entry.geometry, 90);
    const label = document.createElement("div");
    label.textContent = `#${entry.s}`;
    item.appendChild(label);
    strip.appendChild(item);
  }
}

async function poll(): Promise<void> {
  const sid = state.sessionId;
  if (!sid) return;
  try {
    const handle = await api.getSession(sid);
    const wasAwaiting = state.status === "awaiting_selection";
    state = onHandle(state, handle);
    if (state.status === "awaiting_selection" &&
        state.alternatives.length === 0) {
      const alts = await api.getAlternatives(sid);
      state = onAlternatives(state, alts);
      renderAlternatives();
      await refreshArchive();
      await refreshHistory();
    } else if (!wasAwaiting) {
      renderAlternatives();
    }
  } catch (err) {
    state = onError(state, String(err));
  }
  setStatusLine();
  schedulePoll(pollDelayMs(state));
}

function schedulePoll(delay: number): void {
  if (pollTimer !== undefined) window.clearTimeout(pollTimer);
  pollTimer = window.setTimeout(() => void poll(), delay);
}

async function start(): Promise<void> {
  const das = el<HTMLSelectElement>("das-select").value;
  const evals = Number(el<HTMLInputElement>("evals-input").value) || 2000;
  const seed = Number(el<HTMLInputElement>("seed-input").value) || 0;
  try {
    const handle = await api.createSession({
      das,
      seed,
      evals_per_selection: evals,
    });
    state = onSessionCreated(state, handle);
    el<HTMLElement>("cards").innerHTML = "";
    el<HTMLElement>("history").innerHTML = "";
  } catch (err) {
    state = onError(state, String(err));
  }
  setStatusLine();
  schedulePoll(200);
}

async function resample(): Promise<void> {
  if (!canResample(state) || !state.sessionId) return;
  const das = el<HTMLSelectElement>("das-select").value;
  try {
    const alts = await api.getAlternatives(state.sessionId, das);
    state = onAlternatives(state, alts);
    renderAlternatives();
  } catch (err) {
    state = onError(state, String(err));
  }
  setStatusLine();
}

async function exportLog(): Promise<void> {
  if (!canExport(state) || !state.sessionId) return;
  const text = await api.exportRunLog(state.sessionId);
  const blob = new Blob([text], { type: "application/x-ndjson" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = `session-${state.sessionId}.jsonl`;
  link.click();
  URL.revokeObjectURL(link.href);
}

export function boot(): void {
  el<HTMLButtonElement>("start-btn").addEventListener("click", () => void start());
  el<HTMLButtonElement>("export-btn").addEventListener("click", () => void exportLog());
  el<HTMLSelectElement>("das-select").addEventListener("change", () => void resample());
  el<HTMLInputElement>("archive-toggle").addEventListener("change", (ev) => {
    archiveWhich = (ev.target as HTMLInputElement).checked
      ? "infeasible"
      : "feasible";
    void refreshArchive();
  });
  setStatusLine();
}

if (typeof document !== "undefined" && document.getElementById("start-btn")) {
  boot();
}

// Session-flow state: what the controls are allowed to do at any moment.
// Pure data + transition guards, driven by app.ts and unit-tested alone.

import type { Alternative, SessionHandle, SessionStatus } from "./api.js";

export interface UiState {
  sessionId: string | null;
  status: SessionStatus | "idle";
  alternatives: Alternative[];
  /** a selection request is in flight; block further submits */
  submitting: boolean;
  selections: number;
  error: string | null;
}

export function initialState(): UiState {
  return {
    sessionId: null,
    status: "idle",
    alternatives: [],
    submitting: false,
    selections: 0,
    error: null,
  };
}

export function canSelect(state: UiState): boolean {
  return (
    state.status === "awaiting_selection" &&
    !state.submitting &&
    state.alternatives.length > 0
  );
}

export function canResample(state: UiState): boolean {
  return state.status === "awaiting_selection" && !state.submitting;
}

export function canExport(state: UiState): boolean {
  return state.sessionId !== null && state.status !== "initializing";
}

export function onSessionCreated(state: UiState, handle: SessionHandle): UiState {
  return {
    ...initialState(),
    sessionId: handle.id,
    status: handle.status,
  };
}

export function onHandle(state: UiState, handle: SessionHandle): UiState {
  return {
    ...state,
    status: handle.status,
    selections: handle.selections,
    error: handle.error ?? null,
    // a finished evolution invalidates whatever batch we were showing
    alternatives:
      handle.status === "awaiting_selection" ? state.alternatives : [],
    submitting: handle.status === "evolving" ? false : state.submitting,
  };
}

export function onAlternatives(
  state: UiState,
  alternatives: Alternative[],
): UiState {
  if (state.status !== "awaiting_selection") return state;
  return { ...state, alternatives };
}

export function onSubmit(state: UiState): UiState {
  if (!canSelect(state)) {
    throw new Error(`cannot select while ${state.status}`);
  }
  return { ...state, submitting: true };
}

export function onSubmitAccepted(state: UiState): UiState {
  return { ...state, status: "evolving", submitting: false, alternatives: [] };
}

export function onError(state: UiState, message: string): UiState {
  return { ...state, error: message, submitting: false };
}

/** Poll cadence: fast while something is running, slow when settled. */
export function pollDelayMs(state: UiState): number {
  if (state.status === "initializing" || state.status === "evolving") {
    return 500;
  }
  return 2500;
}

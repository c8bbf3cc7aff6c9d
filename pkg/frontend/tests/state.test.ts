import { describe, expect, it } from "vitest";

import type { Alternative, SessionHandle } from "../src/api.js";
import {
  canExport,
  canResample,
  canSelect,
  initialState,
  onAlternatives,
  onHandle,
  onSessionCreated,
  onSubmit,
  onSubmitAccepted,
  pollDelayMs,
} from "../src/state.js";

const handle = (status: SessionHandle["status"], selections = 0): SessionHandle => ({
  id: "abc",
  status,
  das: "corners",
  selections,
  alternatives_ready: status === "awaiting_selection",
});

const alt = (id: string): Alternative => ({
  alt_id: id,
  cell: [3, 4],
  bc: [0.2, 0.7],
  fitness: 0.8,
  feasibility: 1.0,
  geometry: { bounds: { width: 8, height: 7 }, rooms: [], openings: [] },
});

describe("session flow guards", () => {
  it("starts idle with nothing allowed", () => {
    const s = initialState();
    expect(canSelect(s)).toBe(false);
    expect(canResample(s)).toBe(false);
    expect(canExport(s)).toBe(false);
  });

  it("cannot select while initializing or evolving", () => {
    let s = onSessionCreated(initialState(), handle("initializing"));
    expect(canSelect(s)).toBe(false);
    s = onHandle(s, handle("evolving"));
    expect(canSelect(s)).toBe(false);
    expect(() => onSubmit(s)).toThrow(/cannot select/);
  });

  it("allows selection only with a live batch", () => {
    let s = onSessionCreated(initialState(), handle("initializing"));
    s = onHandle(s, handle("awaiting_selection"));
    expect(canSelect(s)).toBe(false);
    s = onAlternatives(s, [alt("a"), alt("b")]);
    expect(canSelect(s)).toBe(true);
    expect(canResample(s)).toBe(true);
  });

  it("submit locks until accepted, then evolving clears the batch", () => {
    let s = onHandle(
      onSessionCreated(initialState(), handle("initializing")),
      handle("awaiting_selection"),
    );
    s = onAlternatives(s, [alt("a")]);
    s = onSubmit(s);
    expect(canSelect(s)).toBe(false);
    s = onSubmitAccepted(s);
    expect(s.status).toBe("evolving");
    expect(s.alternatives).toHaveLength(0);
  });

  it("a handle update away from awaiting drops stale alternatives", () => {
    let s = onHandle(
      onSessionCreated(initialState(), handle("initializing")),
      handle("awaiting_selection"),
    );
    s = onAlternatives(s, [alt("a")]);
    s = onHandle(s, handle("evolving"));
    expect(s.alternatives).toHaveLength(0);
    s = onHandle(s, handle("awaiting_selection", 1));
    expect(s.selections).toBe(1);
    expect(canSelect(s)).toBe(false); // needs a fresh batch first
  });

  it("export allowed once out of initializing", () => {
    let s = onSessionCreated(initialState(), handle("initializing"));
    expect(canExport(s)).toBe(false);
    s = onHandle(s, handle("awaiting_selection"));
    expect(canExport(s)).toBe(true);
  });

  it("polls fast while busy, slow when settled", () => {
    const busy = onSessionCreated(initialState(), handle("initializing"));
    const settled = onHandle(busy, handle("awaiting_selection"));
    expect(pollDelayMs(busy)).toBeLessThan(pollDelayMs(settled));
  });
});

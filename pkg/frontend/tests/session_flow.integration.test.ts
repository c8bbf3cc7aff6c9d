// Scripted end-to-end session against a live service, exercising the same
// client and rendering code the browser uses.  Start the service first
// (`ucme serve --port 8008`) and run with:
//   UCME_INTEGRATION=1 UCME_SERVICE_URL=http://127.0.0.1:8008 npm run test:integration

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { floorplanSvg } from "../src/render.js";

const BASE = process.env.UCME_SERVICE_URL ?? "http://127.0.0.1:8008";
const enabled = process.env.UCME_INTEGRATION === "1";

const STUDIO_DS = {
  bounds: { width: 8.0, height: 7.0 },
  units: [
    { id: 1, name: "Room", kind: "interior", area: 16, entrances: 1, windows: 1 },
    { id: 2, name: "Patio", kind: "exterior", area: 8 },
    { id: 3, name: "Hall", kind: "interior", area: 6 },
  ],
  adjacencies: [[1, 2], [1, 3]],
};

async function waitFor(
  client: ApiClient,
  id: string,
  status: string,
  timeoutMs = 240_000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    const handle = await client.getSession(id);
    if (handle.status === status) return;
    if (handle.status === "failed") {
      throw new Error(`session failed: ${handle.error}`);
    }
    await new Promise((r) => setTimeout(r, 300));
  }
  throw new Error(`timed out waiting for ${status}`);
}

describe.runIf(enabled)("scripted live session", () => {
  it("runs create -> render -> select -> window moves -> export", async () => {
    const client = new ApiClient(BASE);
    const handle = await client.createSession({
      ds: STUDIO_DS,
      seed: 11,
      das: "corners",
      evals_per_selection: 150,
      initial_individuals: 30,
      sites: 70,
    });
    expect(handle.status).toBe("initializing");
    await waitFor(client, handle.id, "awaiting_selection");

    const first = await client.getAlternatives(handle.id);
    expect(first.length).toBeGreaterThanOrEqual(1);
    expect(first.length).toBeLessThanOrEqual(4);
    for (const alt of first) {
      const svg = floorplanSvg(alt.geometry, 220);
      expect(svg).toContain("<polygon");
    }

    const chosen = first[0];
    await client.submitSelection(handle.id, chosen.alt_id);
    await waitFor(client, handle.id, "awaiting_selection");

    const view = await client.getArchive(handle.id, "feasible");
    const res = view.resolution;
    const w = view.window.size;
    const clamp = (v: number) => Math.max(0, Math.min(v, res - w));
    expect(view.window.origin[0]).toBe(clamp(chosen.cell[0] - (w - 1) / 2));
    expect(view.window.origin[1]).toBe(clamp(chosen.cell[1] - (w - 1) / 2));

    const second = await client.getAlternatives(handle.id);
    expect(second.length).toBeGreaterThanOrEqual(1);

    const log = await client.exportRunLog(handle.id);
    const selections = log
      .split("\n")
      .filter((line) => line.includes('"type":"selection"'));
    expect(selections).toHaveLength(1);

    const history = await client.getHistory(handle.id);
    expect(history).toHaveLength(1);
    expect(floorplanSvg(history[0].geometry, 90)).toContain("<svg");
  }, 300_000);
});

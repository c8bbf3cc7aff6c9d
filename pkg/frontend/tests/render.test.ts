import { describe, expect, it } from "vitest";

import type { Geometry } from "../src/api.js";
import {
  colorForQuality,
  fitTransform,
  floorplanSvg,
  roomColor,
  toPx,
} from "../src/render.js";

const geometry: Geometry = {
  bounds: { width: 8, height: 7 },
  rooms: [
    {
      id: 1,
      name: "Room",
      kind: "interior",
      polygons: [[[0, 0], [4, 0], [4, 3], [0, 3]]],
    },
    {
      id: 2,
      name: "Patio <deck>",
      kind: "exterior",
      polygons: [[[4, 0], [8, 0], [8, 3], [4, 3]]],
    },
  ],
  openings: [
    { kind: "door", rooms: [1, 2], segment: [[4, 1], [4, 2]] },
    { kind: "window", rooms: [1], segment: [[0, 1], [0, 2]] },
  ],
};

describe("fitTransform", () => {
  it("fits meters into pixels preserving aspect", () => {
    const t = fitTransform({ width: 8, height: 7 }, 220);
    expect(t.scale).toBeCloseTo((220 - 12) / 8);
    const [x0, y0] = toPx(t, 0, 0);
    const [x1, y1] = toPx(t, 8, 7);
    expect(x0).toBeGreaterThanOrEqual(0);
    expect(x1).toBeLessThanOrEqual(220);
    // y axis flips: higher meters -> smaller pixel y
    expect(y1).toBeLessThan(y0);
  });
});

describe("floorplanSvg", () => {
  const svg = floorplanSvg(geometry, 220);

  it("draws one polygon per room part and shows labels", () => {
    expect(svg.match(/<polygon/g)).toHaveLength(2);
    expect(svg).toContain("Room");
    expect(svg).toContain("Patio &lt;deck&gt;");
  });

  it("draws openings as class-tagged line segments", () => {
    expect(svg.match(/<line/g)).toHaveLength(2);
    expect(svg).toContain("opening-door");
    expect(svg).toContain("opening-window");
  });

  it("keeps every coordinate inside the viewport", () => {
    const coords = [...svg.matchAll(/points="([^"]+)"/g)]
      .flatMap((m) => m[1].split(/[ ,]/).map(Number));
    expect(coords.length).toBeGreaterThan(0);
    for (const v of coords) {
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(220);
    }
  });

  it("uses distinct stable fills per room", () => {
    expect(roomColor(1)).not.toBe(roomColor(2));
    expect(roomColor(5)).toBe(roomColor(5));
  });
});

describe("colorForQuality", () => {
  it("maps empty cells to the background", () => {
    expect(colorForQuality(null, "feasible")).toBe("#16161d");
  });

  it("spans the fitness scale from 0.6 to 1 on the feasible archive", () => {
    const low = colorForQuality(0.6, "feasible");
    const high = colorForQuality(1.0, "feasible");
    expect(low).not.toBe(high);
    expect(colorForQuality(0.55, "feasible")).toBe(low); // clamps below
  });

  it("uses the full range for the infeasible archive", () => {
    expect(colorForQuality(0.0, "infeasible"))
      .not.toBe(colorForQuality(0.99, "infeasible"));
  });
});

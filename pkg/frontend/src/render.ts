// Pure rendering helpers: floorplan cards as SVG markup, heatmap colors.
// Everything here is a function of service payloads; DOM wiring lives in
// app.ts so these stay unit-testable.

import type { ArchiveView, Geometry } from "./api.js";

const ROOM_PALETTE = [
  "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
  "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
];

export function roomColor(roomId: number): string {
  return ROOM_PALETTE[Math.abs(roomId) % ROOM_PALETTE.length];
}

export interface Transform {
  scale: number;
  offsetX: number;
  offsetY: number;
  /** canvas height in px, for the y flip (meters go up, pixels go down) */
  height: number;
}

export function fitTransform(
  bounds: { width: number; height: number },
  px: number,
  pad = 6,
): Transform {
  const scale = Math.min(
    (px - 2 * pad) / bounds.width,
    (px - 2 * pad) / bounds.height,
  );
  const offsetX = (px - bounds.width * scale) / 2;
  const offsetY = (px - bounds.height * scale) / 2;
  return { scale, offsetX, offsetY, height: px };
}

export function toPx(t: Transform, x: number, y: number): [number, number] {
  return [t.offsetX + x * t.scale, t.height - (t.offsetY + y * t.scale)];
}

function polygonPoints(t: Transform, polygon: number[][]): string {
  return polygon
    .map(([x, y]) => toPx(t, x, y).map((v) => v.toFixed(1)).join(","))
    .join(" ");
}

function centroid(polygon: number[][]): [number, number] {
  let sx = 0;
  let sy = 0;
  for (const [x, y] of polygon) {
    sx += x;
    sy += y;
  }
  return [sx / polygon.length, sy / polygon.length];
}

/** One floorplan as standalone SVG markup (rooms, labels, openings). */
export function floorplanSvg(geometry: Geometry, px: number): string {
  const t = fitTransform(geometry.bounds, px);
  const parts: string[] = [];
  const [x0, y0] = toPx(t, 0, 0);
  const [x1, y1] = toPx(t, geometry.bounds.width, geometry.bounds.height);
  parts.push(
    `<rect x="${Math.min(x0, x1)}" y="${Math.min(y0, y1)}" ` +
      `width="${Math.abs(x1 - x0)}" height="${Math.abs(y1 - y0)}" ` +
      `class="plot-bounds"/>`,
  );
  for (const room of geometry.rooms) {
    for (const polygon of room.polygons) {
      parts.push(
        `<polygon points="${polygonPoints(t, polygon)}" ` +
          `fill="${roomColor(room.id)}" class="room room-${room.kind}"/>`,
      );
    }
    if (room.polygons.length > 0) {
      const [cx, cy] = centroid(room.polygons[0]);
      const [lx, ly] = toPx(t, cx, cy);
      parts.push(
        `<text x="${lx.toFixed(1)}" y="${ly.toFixed(1)}" class="room-label">` +
          `${escapeXml(room.name)}</text>`,
      );
    }
  }
  for (const opening of geometry.openings) {
    const [a, b] = opening.segment;
    const [ax, ay] = toPx(t, a[0], a[1]);
    const [bx, by] = toPx(t, b[0], b[1]);
    parts.push(
      `<line x1="${ax.toFixed(1)}" y1="${ay.toFixed(1)}" ` +
        `x2="${bx.toFixed(1)}" y2="${by.toFixed(1)}" ` +
        `class="opening opening-${opening.kind}"/>`,
    );
  }
  return (
    `<svg viewBox="0 0 ${px} ${px}" width="${px}" height="${px}" ` +
    `xmlns="http://www.w3.org/2000/svg">${parts.join("")}</svg>`
  );
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/**
 * Quality to color.  The feasible archive shows fitness on the [0.6, 1]
 * scale; the infeasible archive shows feasibility on [0, 1).
 */
export function colorForQuality(
  q: number | null,
  which: "feasible" | "infeasible",
): string {
  if (q === null) return "#16161d";
  const lo = which === "feasible" ? 0.6 : 0.0;
  const t = Math.max(0, Math.min(1, (q - lo) / (1 - lo)));
  // dark blue -> yellow ramp
  const r = Math.round(40 + 215 * t);
  const g = Math.round(40 + 195 * t);
  const b = Math.round(120 - 80 * t);
  return `rgb(${r},${g},${b})`;
}

/** Draw an archive view onto a square canvas, window outlined. */
export function drawHeatmap(
  canvas: HTMLCanvasElement,
  view: ArchiveView,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const res = view.resolution;
  const cell = Math.floor(canvas.width / res) || 1;
  ctx.fillStyle = "#16161d";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  for (let row = 0; row < res; row++) {
    for (let col = 0; col < res; col++) {
      const q = view.quality[row][col];
      if (q === null) continue;
      ctx.fillStyle = colorForQuality(q, view.which);
      // row 0 is the lowest behavior value: draw it at the bottom
      ctx.fillRect(col * cell, (res - 1 - row) * cell, cell, cell);
    }
  }
  const { origin, size } = view.window;
  ctx.strokeStyle = "#ff4136";
  ctx.lineWidth = 2;
  ctx.strokeRect(
    origin[0] * cell,
    (res - origin[1] - size) * cell,
    size * cell,
    size * cell,
  );
}

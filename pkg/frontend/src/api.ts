// Typed client for the session service.  All UI data flows through here;
// the client never re-derives geometry or scores on its own.

export type SessionStatus =
  | "initializing"
  | "awaiting_selection"
  | "evolving"
  | "failed";

export interface SessionHandle {
  id: string;
  status: SessionStatus;
  das: string;
  selections: number;
  alternatives_ready: boolean;
  evals_done?: number;
  warmup_evals?: number;
  error?: string;
}

export interface RoomGeometry {
  id: number;
  name: string;
  kind: "interior" | "exterior";
  polygons: number[][][];
}

export interface OpeningGeometry {
  kind: string;
  rooms: number[];
  segment: number[][];
}

export interface Geometry {
  bounds: { width: number; height: number };
  rooms: RoomGeometry[];
  openings: OpeningGeometry[];
}

export interface Alternative {
  alt_id: string;
  cell: [number, number];
  bc: [number, number];
  fitness: number;
  feasibility: number;
  geometry: Geometry;
}

export interface ArchiveView {
  which: "feasible" | "infeasible";
  resolution: number;
  bc1_range: [number, number];
  bc2_range: [number, number];
  quality: (number | null)[][];
  window: { origin: [number, number]; size: number };
  coverage: number;
  evals_done: number;
  selections: number;
}

export interface HistoryEntry {
  s: number;
  method: string;
  cell: [number, number];
  bc: [number, number];
  fitness: number;
  geometry: Geometry;
}

export interface SessionRequest {
  ds?: unknown;
  seed?: number;
  das?: string;
  evals_per_selection?: number;
  initial_individuals?: number;
  sites?: number;
  resolution?: number;
  window_size?: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<never> {
  let code = "unknown";
  let message = resp.statusText;
  try {
    const body = await resp.json();
    if (body?.detail?.code) {
      code = body.detail.code;
      message = body.detail.message;
    } else if (body?.detail) {
      message = JSON.stringify(body.detail);
    }
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(resp.status, code, message);
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  url(path: string): string {
    return `${this.base}${path}`;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.url(path), init);
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  createSession(req: SessionRequest): Promise<SessionHandle> {
    return this.json("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  getSession(id: string): Promise<SessionHandle> {
    return this.json(`/sessions/${id}`);
  }

  async getAlternatives(id: string, das?: string): Promise<Alternative[]> {
    const suffix = das ? `?das=${encodeURIComponent(das)}` : "";
    const body = await this.json<{ alternatives: Alternative[] }>(
      `/sessions/${id}/alternatives${suffix}`,
    );
    return body.alternatives;
  }

  submitSelection(id: string, altId: string): Promise<{ status: string }> {
    return this.json(`/sessions/${id}/selection`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ alt_id: altId }),
    });
  }

  getArchive(
    id: string,
    which: "feasible" | "infeasible",
  ): Promise<ArchiveView> {
    return this.json(`/sessions/${id}/archive?which=${which}`);
  }

  async getHistory(id: string): Promise<HistoryEntry[]> {
    const body = await this.json<{ history: HistoryEntry[] }>(
      `/sessions/${id}/history`,
    );
    return body.history;
  }

  async exportRunLog(id: string): Promise<string> {
    const resp = await fetch(this.url(`/sessions/${id}/export`));
    if (!resp.ok) await parseError(resp);
    return resp.text();
  }
}

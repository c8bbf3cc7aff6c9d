"""Constraint checking, fitness and the two behavior descriptors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import boundary_stats, fragment_labels
from .config import DomainConfig
from .genome import DOOR, ENTRANCE, WINDOW, LayoutGenome
from .geometry import Tessellation, build_tessellation
from .spec import INTERIOR, DesignSpec

_OUTSIDE = -2   # neighbor code for plot-border walls in room terms


class EvaluationError(ValueError):
    """Raised for genomes whose geometry cannot be evaluated."""


@dataclass(frozen=True)
class Evaluation:
    feasible: bool
    feasibility_score: float
    constraint_scores: tuple[float, float, float, float, float, float, float]
    fitness: float                  # mean area precision
    bc: tuple[float, float]         # (mean compactness, plan orthogonality)


def area_precision(area: float, target: float) -> float:
    """Agreement between actual and target area; 1.0 at an exact match."""
    if target <= 0:
        raise ValueError("target area must be positive")
    if area < 0:
        raise ValueError("area must be non-negative")
    if area < target:
        return area / target
    return target / area


def compactness(area: float, perimeter: float) -> float:
    """Perimeter-normalized area of a shape: 2*pi*A / P^2, peaking at 0.5
    for a disc."""
    if perimeter <= 0:
        raise ValueError("perimeter must be positive")
    return min(1.0, max(0.0, 2.0 * math.pi * area / (perimeter * perimeter)))


def polygon_compactness(points: np.ndarray) -> float:
    pts = np.asarray(points, dtype=np.float64)
    x, y = pts[:, 0], pts[:, 1]
    area = 0.5 * abs(float(np.dot(x, np.roll(y, 1)) - np.dot(y, np.roll(x, 1))))
    perimeter = float(np.hypot(*(pts - np.roll(pts, 1, axis=0)).T).sum())
    return compactness(area, perimeter)


def orthogonality(theta: float) -> float:
    """Score of one wall angle: 1.0 at right and straight angles.

    Piecewise linear over [0, pi]: rises 0..1 on [0, pi/2], falls to 0.5 at
    3*pi/4, rises back to 1 at pi.
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"angle {theta} outside [0, pi]")
    if theta < math.pi / 2.0:
        return 2.0 * theta / math.pi
    if theta < 3.0 * math.pi / 4.0:
        return 2.0 - 2.0 * theta / math.pi
    return 2.0 * theta / math.pi - 1.0


def _orthogonality_array(theta: np.ndarray) -> np.ndarray:
    t = 2.0 * theta / math.pi
    return np.where(theta < math.pi / 2.0, t,
                    np.where(theta < 3.0 * math.pi / 4.0, 2.0 - t, t - 1.0))


def tessellation_of(genome: LayoutGenome, ds: DesignSpec,
                    config: DomainConfig) -> Tessellation:
    tess = genome.cached_tessellation()
    if tess is None:
        tess = build_tessellation(genome.sites, ds.width, ds.height,
                                  margin=config.mirror_margin)
        genome._tess = tess
    return tess


def room_sides(tess: Tessellation, assignment: np.ndarray):
    """Room id on each side of every edge (_OUTSIDE beyond the plot)."""
    a_cells = tess.edge_cells[:, 0]
    b_cells = tess.edge_cells[:, 1]
    border = b_cells < 0
    ra = assignment[a_cells].astype(np.int64)
    rb = np.where(border, _OUTSIDE,
                  assignment[np.where(border, 0, b_cells)].astype(np.int64))
    return ra, rb, border


def evaluate(genome: LayoutGenome, ds: DesignSpec,
             config: DomainConfig | None = None) -> Evaluation:
    """Score one genome against its design spec.

    Pure: identical inputs give identical results.  Raises EvaluationError
    for degenerate geometry (coincident sites).
    """
    config = config or DomainConfig()
    try:
        tess = tessellation_of(genome, ds, config)
    except ValueError as exc:
        raise EvaluationError(str(exc)) from exc

    assignment = genome.assignment
    ra, rb, border = room_sides(tess, assignment)
    max_id = max(ds.unit_ids)

    assigned = assignment >= 0
    room_areas = np.bincount(
        assignment[assigned].astype(np.int64),
        weights=tess.areas[assigned], minlength=max_id + 1,
    )
    placed = [u.id for u in ds.units if room_areas[u.id] > 0]

    # (a) each placed room is one connected region; (e) the same, counting
    # only walls wide enough to pass through.
    frags_all, frags_wide = room_fragmentation(tess, assignment,
                                               config.pathway_width)
    if placed:
        score_a = sum(1 for r in placed if frags_all.get(r, 1) == 1) / len(placed)
        score_e = sum(1 for r in placed if frags_wide.get(r, 1) == 1) / len(placed)
    else:
        score_a = score_e = 1.0

    # (b) required adjacencies share enough boundary
    shared = shared_boundary_lengths(tess, ra, rb, max_id)
    if ds.adjacencies:
        met = sum(
            1 for a, b in ds.adjacencies
            if shared.get((a, b), 0.0) >= config.door_width
        )
        score_b = met / len(ds.adjacencies)
    else:
        score_b = 1.0

    # (c) mean area precision against its feasibility floor
    precisions = [
        area_precision(float(room_areas[u.id]), u.target_area) for u in ds.units
    ]
    pbar = sum(precisions) / len(precisions)
    score_c = min(1.0, pbar / config.area_floor)

    # (d) prescribed openings present and properly placed
    score_d = _openings_score(genome, tess, ds, config, assignment)

    # (f, g) engine guards on the tessellation itself
    score_f = tess.largest_component_fraction
    score_g = min(1.0, tess.interior_fraction / config.interior_cell_floor)

    scores = (score_a, score_b, score_c, score_d, score_e, score_f, score_g)
    feasibility = sum(scores) / 7.0
    feasible = all(s == 1.0 for s in scores) and pbar >= config.area_floor

    bc = _behavior(tess, assignment, ra, rb, room_areas, placed)
    return Evaluation(feasible, feasibility, scores, pbar, bc)


def room_fragmentation(tess, assignment, pathway_width):
    """Connected-piece counts per room, over all shared walls and over
    wide-enough walls only.  One union-find pass serves both."""
    ea, eb, el = tess.interior_edge_arrays()
    labels_all, labels_wide = fragment_labels(ea, eb, el, assignment,
                                              pathway_width)
    mask = assignment >= 0
    rooms = assignment[mask].astype(np.int64)
    n1 = tess.n_cells + 1
    frags_all = _count_components(rooms, labels_all[mask], n1)
    frags_wide = _count_components(rooms, labels_wide[mask], n1)
    return frags_all, frags_wide


def _count_components(rooms, labels, n1) -> dict[int, int]:
    uniq = np.unique(rooms * n1 + labels)
    counts = np.bincount(uniq // n1)
    return {int(r): int(counts[r]) for r in np.nonzero(counts)[0]}


def shared_boundary_lengths(tess, ra, rb, max_id) -> dict[tuple[int, int], float]:
    """Total wall length shared by each pair of distinct rooms."""
    mask = (ra >= 0) & (rb >= 0) & (ra != rb)
    if not mask.any():
        return {}
    lo = np.minimum(ra[mask], rb[mask])
    hi = np.maximum(ra[mask], rb[mask])
    key = lo * (max_id + 1) + hi
    sums = np.bincount(key, weights=tess.edge_len[mask])
    nz = np.nonzero(sums)[0]
    return {
        (int(k // (max_id + 1)), int(k % (max_id + 1))): float(sums[k])
        for k in nz
    }


def prescribed_openings(ds: DesignSpec) -> int:
    total = len(ds.adjacencies)
    total += sum(u.entrances for u in ds.units)
    total += sum(u.windows for u in ds.units if u.kind == INTERIOR)
    return total


def classify_valid_openings(openings, tess, assignment, ds, config):
    """Split openings into properly placed doors, entrances and windows.

    Doors map a required-adjacency pair to one valid opening; entrances
    and windows map a unit id to {edge key: opening} for valid placements.
    Anything dangling, mis-roomed or on a too-short wall is ignored.
    """
    required_pairs = {(min(a, b), max(a, b)) for a, b in ds.adjacencies}
    doors: dict[tuple[int, int], "Opening"] = {}
    entrances: dict[int, dict] = {}
    windows: dict[int, dict] = {}
    for o in openings:
        eid = tess.edge_id_of(tuple(o.edge))
        if eid is None:
            continue
        length = tess.edge_len[eid]
        a, b = tess.edge_cells[eid]
        if o.kind == DOOR:
            if b < 0 or len(o.rooms) != 2 or length < config.door_width:
                continue
            pair = (min(o.rooms), max(o.rooms))
            if pair not in required_pairs or pair in doors:
                continue
            if {int(assignment[a]), int(assignment[b])} == set(pair):
                doors[pair] = o
        elif o.kind == ENTRANCE:
            if b >= 0 or len(o.rooms) != 1 or length < config.door_width:
                continue
            if int(assignment[a]) == o.rooms[0]:
                entrances.setdefault(o.rooms[0], {}).setdefault(tuple(o.edge), o)
        elif o.kind == WINDOW:
            if b >= 0 or len(o.rooms) != 1 or length < config.window_width:
                continue
            if int(assignment[a]) == o.rooms[0]:
                windows.setdefault(o.rooms[0], {}).setdefault(tuple(o.edge), o)
    return doors, entrances, windows


def _openings_score(genome, tess, ds, config, assignment) -> float:
    total = prescribed_openings(ds)
    if total == 0:
        return 1.0
    doors, entrances, windows = classify_valid_openings(
        genome.openings, tess, assignment, ds, config)
    placed = len(doors)
    for u in ds.units:
        if u.entrances:
            placed += min(u.entrances, len(entrances.get(u.id, ())))
        if u.windows and u.kind == INTERIOR:
            placed += min(u.windows, len(windows.get(u.id, ())))
    return placed / total


def _behavior(tess, assignment, ra, rb, room_areas, placed):
    if not placed:
        return (0.0, 0.0)
    boundary_ids = np.nonzero(ra != rb)[0]
    ev = tess.edge_verts[boundary_ids]
    p0 = tess.verts[ev[:, 0]]
    p1 = tess.verts[ev[:, 1]]
    # quantized endpoint ids: 1e-6 m grid packed into one int each
    k0 = (np.rint((p0[:, 0] + 1.0) * 1e6).astype(np.int64) << 26) \
        + np.rint((p0[:, 1] + 1.0) * 1e6).astype(np.int64)
    k1 = (np.rint((p1[:, 0] + 1.0) * 1e6).astype(np.int64) << 26) \
        + np.rint((p1[:, 1] + 1.0) * 1e6).astype(np.int64)

    by_room: dict[int, list[int]] = {r: [] for r in placed}
    ra_l = ra[boundary_ids].tolist()
    rb_l = rb[boundary_ids].tolist()
    for i in range(len(boundary_ids)):
        bucket = by_room.get(ra_l[i])
        if bucket is not None:
            bucket.append(i)
        bucket = by_room.get(rb_l[i])
        if bucket is not None:
            bucket.append(i)

    member_lists = [by_room[room] for room in placed]
    offsets = np.zeros(len(placed) + 1, dtype=np.int64)
    for i, lst in enumerate(member_lists):
        offsets[i + 1] = offsets[i] + len(lst)
    order = np.asarray(
        [i for lst in member_lists for i in lst], dtype=np.int64)
    perims, orth_sum, n_angles = boundary_stats(
        k0[order], k1[order],
        np.ascontiguousarray(p0[order, 0]), np.ascontiguousarray(p0[order, 1]),
        np.ascontiguousarray(p1[order, 0]), np.ascontiguousarray(p1[order, 1]),
        offsets,
    )
    compactness_sum = 0.0
    for i, room in enumerate(placed):
        if perims[i] > 0:
            compactness_sum += compactness(float(room_areas[room]),
                                           float(perims[i]))
    cbar = compactness_sum / len(placed)
    obar = orth_sum / n_angles if n_angles else 0.0
    return (cbar, obar)


def trace_loops(tess: Tessellation, edge_ids: np.ndarray):
    """Chain boundary edges into closed loops.

    Returns a list of (vertex list [(x, y), ...], total length).  Endpoint
    matching uses rounded coordinates so cocircular-degeneracy duplicate
    vertices cannot break the chains.
    """
    ne = len(edge_ids)
    if ne == 0:
        return []
    edge_ids = np.asarray(edge_ids)
    pts = tess.verts[tess.edge_verts[edge_ids].ravel()]
    keys = (np.rint(pts[:, 0] * 1e9) + 1j * np.rint(pts[:, 1] * 1e9)).tolist()
    coords = list(map(tuple, pts.tolist()))
    lens = tess.edge_len[edge_ids].tolist()
    return _walk_loops(list(range(ne)), keys, coords, lens)


def _walk_loops(members: list[int], keys, coords, lens):
    """Chain the edges `members` (indices into keys/coords/lens pairs)
    into closed loops by matching endpoints."""
    incident: dict[complex, list[int]] = {}
    for i in members:
        incident.setdefault(keys[2 * i], []).append(i)
        incident.setdefault(keys[2 * i + 1], []).append(i)

    used: set[int] = set()
    loops = []
    for start in members:
        if start in used:
            continue
        used.add(start)
        chain = [coords[2 * start]]
        length = lens[start]
        home = keys[2 * start]
        cur_key = keys[2 * start + 1]
        cur_pt = coords[2 * start + 1]
        while cur_key != home:
            chain.append(cur_pt)
            nxt = None
            for j in incident.get(cur_key, ()):
                if j not in used:
                    nxt = j
                    break
            if nxt is None:
                break   # open chain: degenerate boundary, keep what we have
            used.add(nxt)
            length += lens[nxt]
            if keys[2 * nxt] == cur_key:
                cur_key = keys[2 * nxt + 1]
                cur_pt = coords[2 * nxt + 1]
            else:
                cur_key = keys[2 * nxt]
                cur_pt = coords[2 * nxt]
        loops.append((chain, length))
    return loops


def loop_area(pts: list[tuple[float, float]]) -> float:
    """Shoelace area of a closed point chain."""
    if len(pts) < 3:
        return 0.0
    total = 0.0
    x1, y1 = pts[-1]
    for x2, y2 in pts:
        total += x1 * y2 - x2 * y1
        x1, y1 = x2, y2
    return 0.5 * abs(total)

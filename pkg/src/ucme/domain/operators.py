"""Layout construction and variation: seeding, growth, destruction, repair.

Mutation is destructive-then-scripted: a few stochastic destruction
operators break the parent, then a fixed repair sequence pushes the result
back toward the design spec.  Repair is best effort; shortfalls surface as
constraint scores below 1, never as exceptions.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .config import DomainConfig
from .evaluate import (
    classify_valid_openings,
    room_fragmentation,
    room_sides,
    shared_boundary_lengths,
    tessellation_of,
)
from .genome import DOOR, ENTRANCE, WINDOW, UNASSIGNED, LayoutGenome, Opening
from .geometry import Tessellation, build_tessellation, reflect_into
from .spec import INTERIOR, DesignSpec

SHIFT_ALL = "shift_all"
JITTER_SUBSET = "jitter_subset"
DELETE_ROOM = "delete_room"
UNSAFE_EXPAND = "unsafe_expand"
SAFE_EXPAND = "safe_expand"
ERODE = "erode"
DELETE_OPENINGS = "delete_openings"

DESTRUCTION_OPS = (
    SHIFT_ALL, JITTER_SUBSET, DELETE_ROOM, UNSAFE_EXPAND, SAFE_EXPAND,
    ERODE, DELETE_OPENINGS,
)

_SITE_OPS = {SHIFT_ALL, JITTER_SUBSET}


def placement_order(ds: DesignSpec):
    """Units by descending adjacency degree, ties by ascending id."""
    return sorted(ds.units, key=lambda u: (-ds.degree(u.id), u.id))


def generate_initial(ds: DesignSpec, rng: np.random.Generator,
                     config: DomainConfig | None = None) -> LayoutGenome:
    """Random sites, greedy room placement, random openings.

    Feasibility is not guaranteed; the result is a legal starting point
    whichever constraints it happens to violate.
    """
    config = config or DomainConfig()
    sites = rng.uniform((0.0, 0.0), (ds.width, ds.height),
                        size=(config.sites, 2))
    sites = _ensure_separation(sites, ds, config, rng)
    tess = build_tessellation(sites, ds.width, ds.height,
                              margin=config.mirror_margin)
    assignment = np.full(config.sites, UNASSIGNED, dtype=np.int16)
    for unit in placement_order(ds):
        seed = _choose_seed(tess, assignment, unit, ds, rng)
        if seed is None:
            continue
        assignment[seed] = unit.id
        _grow(tess, assignment, unit.id, rng, target_area=unit.target_area)
    openings = refresh_openings(tess, assignment, (), ds, config, rng)
    return LayoutGenome(sites, assignment, openings, tess)


def mutate(genome: LayoutGenome, ds: DesignSpec, rng: np.random.Generator,
           config: DomainConfig | None = None) -> LayoutGenome:
    """Destroy (1-3 distinct operators) then repair.  Parent untouched."""
    config = config or DomainConfig()
    k = int(rng.integers(1, 4))
    ops = [DESTRUCTION_OPS[i] for i in rng.choice(len(DESTRUCTION_OPS),
                                                  size=k, replace=False)]
    sites = genome.sites
    assignment = genome.assignment.copy()
    openings = list(genome.openings)
    tess = genome.cached_tessellation()

    for op in ops:
        if op in _SITE_OPS:
            sites = _apply_site_op(op, sites, ds, config, rng)
            tess = None
        else:
            if tess is None:
                tess = build_tessellation(sites, ds.width, ds.height,
                                          margin=config.mirror_margin)
            _apply_assignment_op(op, tess, assignment, openings, ds,
                                 config, rng)
    if tess is None:
        tess = build_tessellation(sites, ds.width, ds.height,
                                  margin=config.mirror_margin)
    repaired_openings = _repair(tess, assignment, tuple(openings), ds,
                                config, rng)
    return LayoutGenome(sites, assignment, repaired_openings, tess)


def destruction(genome: LayoutGenome, op: str, ds: DesignSpec,
                rng: np.random.Generator,
                config: DomainConfig | None = None) -> LayoutGenome:
    """Apply a single destruction operator (no repair).  Inapplicable
    operators return an identical copy."""
    config = config or DomainConfig()
    if op not in DESTRUCTION_OPS:
        raise ValueError(f"unknown destruction operator {op!r}")
    if op in _SITE_OPS:
        sites = _apply_site_op(op, genome.sites, ds, config, rng)
        return LayoutGenome(sites, genome.assignment.copy(), genome.openings)
    assignment = genome.assignment.copy()
    openings = list(genome.openings)
    tess = tessellation_of(genome, ds, config)
    _apply_assignment_op(op, tess, assignment, openings, ds, config, rng)
    return LayoutGenome(genome.sites, assignment, tuple(openings), tess)


def repair(genome: LayoutGenome, ds: DesignSpec, rng: np.random.Generator,
           config: DomainConfig | None = None) -> LayoutGenome:
    """Run the scripted repair sequence on a copy of `genome`."""
    config = config or DomainConfig()
    tess = tessellation_of(genome, ds, config)
    assignment = genome.assignment.copy()
    openings = _repair(tess, assignment, genome.openings, ds, config, rng)
    return LayoutGenome(genome.sites, assignment, openings, tess)


def place_openings(genome: LayoutGenome, ds: DesignSpec,
                   rng: np.random.Generator,
                   config: DomainConfig | None = None) -> LayoutGenome:
    """Keep valid prescribed openings, place missing ones at random."""
    config = config or DomainConfig()
    tess = tessellation_of(genome, ds, config)
    openings = refresh_openings(tess, genome.assignment, genome.openings,
                                ds, config, rng)
    return LayoutGenome(genome.sites, genome.assignment.copy(), openings, tess)


def _ensure_separation(sites: np.ndarray, ds: DesignSpec,
                       config: DomainConfig, rng) -> np.ndarray:
    """Nudge apart any sites closer than the minimum separation."""
    eps = config.min_site_separation
    for _ in range(5):
        order = np.argsort(sites[:, 0], kind="stable")
        xs = sites[order]
        close = (np.abs(np.diff(xs[:, 0])) < eps) \
            & (np.abs(np.diff(xs[:, 1])) < eps)
        if not close.any():
            return sites
        bumped = order[1:][close]
        sites = sites.copy()
        sites[bumped] += rng.uniform(2 * eps, 10 * eps, size=(len(bumped), 2))
        sites[:, 0] = reflect_into(sites[:, 0], ds.width)
        sites[:, 1] = reflect_into(sites[:, 1], ds.height)
    return sites


# ---------------------------------------------------------------------------
# destruction operators


def _apply_site_op(op, sites, ds, config, rng):
    n = len(sites)
    if op == SHIFT_ALL:
        mag = rng.uniform(*config.shift_magnitude)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        moved = sites + np.array([mag * math.cos(ang), mag * math.sin(ang)])
    else:   # JITTER_SUBSET
        frac = rng.uniform(*config.jitter_fraction)
        count = max(1, int(round(frac * n)))
        idx = rng.choice(n, size=count, replace=False)
        mags = rng.uniform(*config.jitter_magnitude, size=count)
        angs = rng.uniform(0.0, 2.0 * math.pi, size=count)
        moved = sites.copy()
        moved[idx, 0] += mags * np.cos(angs)
        moved[idx, 1] += mags * np.sin(angs)
    moved[:, 0] = reflect_into(moved[:, 0], ds.width)
    moved[:, 1] = reflect_into(moved[:, 1], ds.height)
    return _ensure_separation(moved, ds, config, rng)


def _apply_assignment_op(op, tess, assignment, openings, ds, config, rng):
    if op == DELETE_OPENINGS:
        keep = [o for o in openings if rng.random() >= config.delete_opening_prob]
        openings[:] = keep
        return
    rooms = np.unique(assignment[assignment >= 0])
    if len(rooms) == 0:
        return   # inapplicable without rooms
    room = int(rooms[rng.integers(len(rooms))])
    if op == DELETE_ROOM:
        assignment[assignment == room] = UNASSIGNED
        openings[:] = [o for o in openings if room not in o.rooms]
    elif op in (UNSAFE_EXPAND, SAFE_EXPAND):
        rings = int(rng.integers(config.expand_rings[0],
                                 config.expand_rings[1] + 1))
        nbrs = tess.neighbor_lists()
        for _ in range(rings):
            current = np.nonzero(assignment == room)[0].tolist()
            grab: list[int] = []
            for c in current:
                for nb in nbrs[c]:
                    owner = assignment[nb]
                    if owner == room:
                        continue
                    if op == SAFE_EXPAND and owner != UNASSIGNED:
                        continue
                    grab.append(nb)
            if not grab:
                break
            assignment[np.unique(grab)] = room
    elif op == ERODE:
        _erode(tess, assignment, room, config, rng)


def _erode(tess, assignment, room, config, rng):
    budget = int(math.floor(
        config.erode_fraction * int((assignment == room).sum())))
    _remove_boundary_cells(tess, assignment, room, rng, max_removals=budget)


def _remove_boundary_cells(tess, assignment, room, rng, max_removals=None,
                           max_area=None):
    """Strip random boundary cells without disconnecting the room, until a
    removal budget or an area ceiling is reached."""
    nbrs = tess.neighbor_lists()
    nbr_sets = tess.neighbor_sets()
    cells = np.nonzero(assignment == room)[0].tolist()
    area = float(tess.areas[assignment == room].sum())
    border = tess.touches_border
    in_room = set(cells)

    def is_boundary(c: int) -> bool:
        if border[c]:
            return True
        return any(nb not in in_room for nb in nbrs[c])

    boundary = [c for c in cells if is_boundary(c)]
    in_boundary = set(boundary)
    skipped: set[int] = set()
    removals = 0
    while boundary:
        if max_removals is not None and removals >= max_removals:
            break
        if max_area is not None and area <= max_area:
            break
        candidates = [c for c in boundary if c not in skipped]
        if not candidates:
            break
        cell = candidates[rng.integers(len(candidates))]
        if not _is_simple_removal(nbrs, nbr_sets, in_room, cell) \
                and _disconnects(nbrs, in_room, cell):
            skipped.add(cell)
            continue
        in_room.discard(cell)
        in_boundary.discard(cell)
        boundary.remove(cell)
        assignment[cell] = UNASSIGNED
        area -= float(tess.areas[cell])
        removals += 1
        skipped.clear()   # removals change the geometry; re-test blocked cells
        for nb in nbrs[cell]:
            if nb in in_room and nb not in in_boundary:
                in_boundary.add(nb)
                boundary.append(nb)


def _is_room_boundary(tess, assignment, room, cell) -> bool:
    if tess.touches_border[cell]:
        return True
    return any(assignment[nb] != room for nb in tess.neighbor_lists()[cell])


def _is_simple_removal(nbrs, nbr_sets, in_room, cell) -> bool:
    """Cheap sufficient test that removing `cell` keeps the room connected:
    its in-room neighbors must form one connected cluster among themselves.
    Inconclusive cases fall back to the exact reachability check."""
    local = [nb for nb in nbrs[cell] if nb in in_room]
    k = len(local)
    if k <= 1:
        return True   # isolated or leaf cell: the rest is unaffected
    seen = 1
    stack = [local[0]]
    visited = {local[0]}
    while stack:
        cur = stack.pop()
        adj = nbr_sets[cur]
        for other in local:
            if other not in visited and other in adj:
                visited.add(other)
                seen += 1
                stack.append(other)
    return seen == k


def _disconnects(nbrs: list[list[int]], in_room: set[int], cell: int) -> bool:
    count = len(in_room) - 1
    if count <= 1:
        return False
    start = next(iter(c for c in nbrs[cell] if c in in_room), None)
    if start is None:
        return False   # isolated cell: the rest is unaffected
    seen = {start, cell}   # marking `cell` seen removes it from the walk
    queue = deque((start,))
    reached = 1
    while queue:
        c = queue.popleft()
        for nb in nbrs[c]:
            if nb in in_room and nb not in seen:
                seen.add(nb)
                reached += 1
                queue.append(nb)
    return reached != count


# ---------------------------------------------------------------------------
# repair


def _repair(tess, assignment, openings, ds, config, rng) -> tuple[Opening, ...]:
    # 1. re-place missing rooms
    present = set(int(r) for r in np.unique(assignment[assignment >= 0]))
    for unit in placement_order(ds):
        if unit.id in present:
            continue
        seed = _choose_seed(tess, assignment, unit, ds, rng)
        if seed is None:
            continue
        assignment[seed] = unit.id
        _grow(tess, assignment, unit.id, rng, target_area=unit.target_area)

    # 2. reconnect fragmented rooms: keep the largest piece, regrow
    frags_all, _ = room_fragmentation(tess, assignment, 0.0)
    for unit in ds.units:
        if frags_all.get(unit.id, 1) <= 1:
            continue
        comps = _room_components(tess, assignment, unit.id)
        comps.sort(key=lambda c: (-float(tess.areas[c].sum()), int(c.min())))
        for frag in comps[1:]:
            assignment[frag] = UNASSIGNED
        _grow(tess, assignment, unit.id, rng, target_area=unit.target_area)

    # 3. grow rooms toward unmet required adjacencies
    if ds.adjacencies:
        ra, rb, _ = room_sides(tess, assignment)
        shared_map = shared_boundary_lengths(tess, ra, rb, max(ds.unit_ids))
        for a, b in ds.adjacencies:
            shared = shared_map.get((min(a, b), max(a, b)), 0.0)
            if shared >= config.door_width:
                continue
            # earlier growth may have changed walls; recheck before growing
            shared = _pair_shared_length(tess, assignment, a, b)
            if shared >= config.door_width:
                continue
            grower, target = (a, b) if rng.random() < 0.5 else (b, a)
            if not (assignment == grower).any() \
                    or not (assignment == target).any():
                continue
            _grow_toward(tess, assignment, grower, target, config, rng,
                         already=shared)

    # 4. pull every room's area precision above the feasibility floor
    for unit in ds.units:
        mask = assignment == unit.id
        if not mask.any():
            continue
        area = float(tess.areas[mask].sum())
        lo = config.area_floor * unit.target_area
        hi = unit.target_area / config.area_floor
        if area < lo:
            _grow(tess, assignment, unit.id, rng, target_area=lo)
        elif area > hi:
            _shrink(tess, assignment, unit.id, hi, rng)

    # 5. re-validate openings
    return refresh_openings(tess, assignment, openings, ds, config, rng)


def _choose_seed(tess, assignment, unit, ds, rng):
    """A starting cell for one room: prefer cells adjacent to an already
    placed required neighbor, and plot-border cells when the unit needs an
    entrance or window."""
    unassigned_mask = assignment == UNASSIGNED
    if not unassigned_mask.any():
        return None
    required = [a if b == unit.id else b
                for a, b in ds.adjacencies if unit.id in (a, b)]
    cand = np.empty(0, dtype=np.int64)
    if required:
        nbrs = tess.neighbor_lists()
        near = np.zeros(tess.n_cells, dtype=bool)
        req_cells = np.nonzero(np.isin(assignment, required))[0].tolist()
        for c in req_cells:
            near[nbrs[c]] = True
        near &= unassigned_mask
        cand = np.nonzero(near)[0]
    if len(cand) == 0:
        cand = np.nonzero(unassigned_mask)[0]
    needs_exterior = unit.entrances > 0 or (
        unit.windows > 0 and unit.kind == INTERIOR
    )
    if needs_exterior:
        on_border = cand[tess.touches_border[cand]]
        if len(on_border):
            cand = on_border
    return int(cand[rng.integers(len(cand))])


def _grow(tess, assignment, room, rng, target_area=None, max_cells=None):
    """Accrete uniformly random frontier cells until the area target is met
    or the room is walled in.  Returns the resulting area."""
    nbrs = tess.neighbor_lists()
    areas = tess.areas
    cells = np.nonzero(assignment == room)[0].tolist()
    area = float(areas[cells].sum()) if cells else 0.0
    in_frontier = set()
    frontier: list[int] = []
    for c in cells:
        for nb in nbrs[c]:
            if assignment[nb] == UNASSIGNED and nb not in in_frontier:
                in_frontier.add(nb)
                frontier.append(nb)
    added = 0
    while frontier:
        if target_area is not None and area >= target_area:
            break
        if max_cells is not None and added >= max_cells:
            break
        i = int(rng.integers(len(frontier)))
        cell = frontier[i]
        frontier[i] = frontier[-1]
        frontier.pop()
        in_frontier.discard(cell)
        assignment[cell] = room
        area += float(areas[cell])
        added += 1
        for nb in nbrs[cell]:
            if assignment[nb] == UNASSIGNED and nb not in in_frontier:
                in_frontier.add(nb)
                frontier.append(nb)
    return area


def _shrink(tess, assignment, room, max_area, rng):
    """Remove boundary cells (connectivity preserved) until area <= max."""
    _remove_boundary_cells(tess, assignment, room, rng, max_area=max_area)


def _room_components(tess, assignment, room) -> list[np.ndarray]:
    cells = np.nonzero(assignment == room)[0].tolist()
    if not cells:
        return []
    nbrs = tess.neighbor_lists()
    cell_set = set(cells)
    seen: set[int] = set()
    comps = []
    for c in cells:
        if c in seen:
            continue
        comp = [c]
        seen.add(c)
        queue = deque((c,))
        while queue:
            cur = queue.popleft()
            for nb in nbrs[cur]:
                if nb in cell_set and nb not in seen:
                    seen.add(nb)
                    comp.append(nb)
                    queue.append(nb)
        comps.append(np.asarray(sorted(comp)))
    return comps


def _pair_shared_length(tess, assignment, a, b) -> float:
    ca = tess.edge_cells[:, 0]
    cb = tess.edge_cells[:, 1]
    interior = cb >= 0
    ra = assignment[ca[interior]]
    rb = assignment[cb[interior]]
    mask = ((ra == a) & (rb == b)) | ((ra == b) & (rb == a))
    return float(tess.edge_len[interior][mask].sum())


def _grow_toward(tess, assignment, grower, target, config, rng, already=0.0):
    """Greedy growth of `grower` through unassigned cells toward `target`,
    stopping once enough boundary is shared or the budget runs out."""
    nbrs = tess.neighbor_lists()
    nbr_edges = tess.neighbor_edge_lists()
    dist = [-1] * tess.n_cells
    queue = deque()
    for c in np.nonzero(assignment == target)[0].tolist():
        dist[c] = 0
        queue.append(c)
    while queue:
        cur = queue.popleft()
        d = dist[cur] + 1
        for nb in nbrs[cur]:
            if dist[nb] < 0 and assignment[nb] == UNASSIGNED:
                dist[nb] = d
                queue.append(nb)

    shared = already
    grower_cells = np.nonzero(assignment == grower)[0].tolist()
    for _ in range(config.adjacency_growth_budget):
        if shared >= config.door_width:
            break
        best: list[int] = []
        best_d = None
        for c in grower_cells:
            for nb in nbrs[c]:
                if assignment[nb] != UNASSIGNED or dist[nb] < 0:
                    continue
                if best_d is None or dist[nb] < best_d:
                    best_d = dist[nb]
                    best = [nb]
                elif dist[nb] == best_d and nb not in best:
                    best.append(nb)
        if not best:
            break
        cell = best[rng.integers(len(best))]
        assignment[cell] = grower
        grower_cells.append(cell)
        for e, nb in zip(nbr_edges[cell], nbrs[cell]):
            if assignment[nb] == target:
                shared += float(tess.edge_len[e])


# ---------------------------------------------------------------------------
# openings


def refresh_openings(tess, assignment, openings, ds, config, rng):
    """Valid prescribed openings survive; extraneous or dangling ones are
    dropped; missing ones are placed uniformly on qualifying walls."""
    doors, entrances, windows = classify_valid_openings(
        openings, tess, assignment, ds, config)

    ra, rb, border = room_sides(tess, assignment)
    interior = ~border
    result: list[Opening] = []
    used_border: set[tuple[int, int]] = set()

    for a, b in ds.adjacencies:
        pair = (min(a, b), max(a, b))
        kept = doors.get(pair)
        if kept is not None:
            result.append(kept)
            continue
        mask = interior & (tess.edge_len >= config.door_width) & (
            ((ra == a) & (rb == b)) | ((ra == b) & (rb == a))
        )
        cand = np.nonzero(mask)[0]
        if len(cand):
            eid = int(cand[rng.integers(len(cand))])
            result.append(Opening(DOOR, tess.edge_key(eid), pair))

    for unit in ds.units:
        if unit.entrances <= 0:
            continue
        kept = list(entrances.get(unit.id, {}).items())[:unit.entrances]
        for edge_key, opening in kept:
            result.append(opening)
            used_border.add(edge_key)
        missing = unit.entrances - len(kept)
        if missing > 0:
            _place_border(result, used_border, tess, assignment, unit.id,
                          ENTRANCE, config.door_width, missing, ra, border, rng)

    for unit in ds.units:
        if unit.windows <= 0 or unit.kind != INTERIOR:
            continue
        kept = [
            (k, o) for k, o in windows.get(unit.id, {}).items()
            if k not in used_border
        ][:unit.windows]
        for edge_key, opening in kept:
            result.append(opening)
            used_border.add(edge_key)
        missing = unit.windows - len(kept)
        if missing > 0:
            _place_border(result, used_border, tess, assignment, unit.id,
                          WINDOW, config.window_width, missing, ra, border, rng)

    return tuple(result)


def _place_border(result, used_border, tess, assignment, room, kind,
                  min_len, count, ra, border, rng):
    mask = border & (ra == room) & (tess.edge_len >= min_len)
    cand = [int(e) for e in np.nonzero(mask)[0]
            if tess.edge_key(e) not in used_border]
    take = min(count, len(cand))
    if take <= 0:
        return
    picks = rng.choice(len(cand), size=take, replace=False)
    for i in picks:
        eid = cand[int(i)]
        key = tess.edge_key(eid)
        used_border.add(key)
        result.append(Opening(kind, key, (room,)))

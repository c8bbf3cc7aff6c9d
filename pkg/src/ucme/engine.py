"""The interactive search loop: a selection window over twin archives.

Between user selections the algorithm breeds only from inside the window,
recentering it on whatever the user picks; candidates shown to the user
are drawn from the window by one of six sampling methods.  The unwindowed
variant of the same two-archive loop doubles as both the warm-up phase and
the unguided baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .archive import ArchiveConfig, Elite, EliteArchive, QualityRole, cell_of
from .domain import DesignSpec, DomainConfig, evaluate, generate_initial, mutate


class EngineError(RuntimeError):
    pass


class WarmupError(EngineError):
    """Warm-up failed to reach the coverage gate within the budget."""


class ProtocolError(EngineError):
    """A call violated the interaction contract."""


class DasMethod(Enum):
    RANDOM = "random"
    QUADRANTS = "quadrants"
    SQUARES = "squares"
    EDGES = "edges"
    CORNERS = "corners"
    MEDOIDS = "medoids"


@dataclass(frozen=True)
class SelectionWindow:
    origin: tuple[int, int]   # (col, row) of the lower-left cell
    size: int

    @property
    def center(self) -> tuple[int, int]:
        half = (self.size - 1) // 2
        return (self.origin[0] + half, self.origin[1] + half)

    def contains(self, cell: tuple[int, int]) -> bool:
        c, r = cell
        return (self.origin[0] <= c < self.origin[0] + self.size
                and self.origin[1] <= r < self.origin[1] + self.size)


def clamp_origin(center: tuple[int, int], size: int,
                 resolution: int) -> tuple[int, int]:
    half = (size - 1) // 2
    lo_c = min(max(center[0] - half, 0), resolution - size)
    lo_r = min(max(center[1] - half, 0), resolution - size)
    return (lo_c, lo_r)


def recenter(window: SelectionWindow, target: tuple[int, int],
             resolution: int) -> SelectionWindow:
    """Center the window on `target`, clamped to stay inside the grid."""
    return SelectionWindow(clamp_origin(target, window.size, resolution),
                           window.size)


def initial_window(feasible: EliteArchive, size: int) -> SelectionWindow:
    """First window: centered at the cell of the mean behavior of all
    feasible elites, or at the nearest occupied cell if that one is empty."""
    elites = feasible.elites()
    if not elites:
        raise EngineError("cannot place a window on an empty archive")
    mean_bc = (
        sum(e.evaluation.bc[0] for e in elites) / len(elites),
        sum(e.evaluation.bc[1] for e in elites) / len(elites),
    )
    center = cell_of(mean_bc, feasible.config)
    if feasible.elite_at(center) is None:
        occupied = feasible.occupied_cells()   # row-major: ties break here
        center = min(
            occupied,
            key=lambda cell: ((cell[0] - center[0]) ** 2
                              + (cell[1] - center[1]) ** 2),
        )
    return SelectionWindow(
        clamp_origin(center, size, feasible.resolution), size)


# ---------------------------------------------------------------------------
# design-alternative sampling


_EXACT_MEDOID_LIMIT = 12


def kmedoids(points: list[tuple[int, int]], k: int) -> list[tuple[int, int]]:
    """k representative points under Manhattan distance.

    Small inputs (up to 12 points) are solved exactly by subset
    enumeration; larger ones run PAM (greedy build, best-improvement
    swaps) restarted from every possible first medoid.  Single-start PAM
    lands on local optima more than 5% over the true cost on roughly one
    small instance in ten, which is outside this function's tolerance
    contract, hence the exact path.  Deterministic given input order
    (ties go to the lexicographically smallest index set).
    """
    n = len(points)
    if n == 0:
        raise ValueError("no points to cluster")
    if n <= k:
        return list(points)
    pts = np.asarray(points, dtype=np.int64)
    dist = np.abs(pts[:, None, :] - pts[None, :, :]).sum(axis=2)

    if n <= _EXACT_MEDOID_LIMIT:
        import itertools
        best_cost = None
        best_combo = None
        for combo in itertools.combinations(range(n), k):
            cost = dist[list(combo)].min(axis=0).sum()
            if best_cost is None or cost < best_cost:
                best_cost = cost
                best_combo = combo
        return [points[i] for i in best_combo]

    big = np.iinfo(np.int64).max
    best_key = None
    for first in range(n):
        medoids = [first]
        nearest = dist[first].copy()
        while len(medoids) < k:
            gain = np.minimum(nearest[None, :], dist).sum(axis=1)
            gain[medoids] = big
            nxt = int(np.argmin(gain))
            medoids.append(nxt)
            nearest = np.minimum(nearest, dist[nxt])
        current = int(dist[medoids].min(axis=0).sum())
        while True:
            best_cost = current
            best_swap = None
            med_rows = dist[medoids]
            for mi in range(len(medoids)):
                others = np.delete(med_rows, mi, axis=0)
                base = others.min(axis=0) if len(others) \
                    else np.full(n, big // 2)
                cand_costs = np.minimum(base[None, :], dist).sum(axis=1)
                cand_costs[medoids] = big
                ci = int(np.argmin(cand_costs))
                if cand_costs[ci] < best_cost:
                    best_cost = int(cand_costs[ci])
                    best_swap = (mi, ci)
            if best_swap is None:
                break
            medoids[best_swap[0]] = best_swap[1]
            current = best_cost
        key = (current, tuple(sorted(medoids)))
        if best_key is None or key < best_key:
            best_key = key
    return [points[i] for i in best_key[1]]


def _quadrant_sector(dx: int, dy: int) -> int:
    """Diagonal split into N(0), E(1), S(2), W(3) triangles; cells on a
    diagonal go to the triangle counterclockwise of their half-diagonal,
    the center cell to N."""
    adx, ady = abs(dx), abs(dy)
    if ady > adx:
        return 0 if dy > 0 else 2
    if adx > ady:
        return 1 if dx > 0 else 3
    # on a diagonal (|dx| == |dy|)
    if dx == 0:
        return 0                   # center cell
    if dx > 0:
        return 0 if dy > 0 else 1  # NE ray -> N, SE ray -> E
    return 2 if dy < 0 else 3      # SW ray -> S, NW ray -> W


def _square_sector(dx: int, dy: int) -> int:
    """Axis split into SW(0), SE(1), NW(2), NE(3) quarters; cells on the
    center row or column go to the lower-left quarter."""
    if dx == 0 or dy == 0:
        return 0
    if dy < 0:
        return 0 if dx < 0 else 1
    return 2 if dx < 0 else 3


def sample_from_window(archive: EliteArchive, window: SelectionWindow,
                       method: DasMethod, count: int,
                       rng: np.random.Generator) -> list[Elite]:
    """Up to `count` elites from the window per the sampling method.

    Results are distinct cells; when fewer distinct candidates exist the
    smaller set is returned (never empty)."""
    origin = window.origin
    w = window.size
    occupied = archive.occupied_cells_in(origin, (w, w))
    if not occupied:
        raise EngineError("no occupied cells inside the window")
    if len(occupied) <= 1:
        return [archive.elite_at(occupied[0])]

    if method is DasMethod.RANDOM:
        take = min(count, len(occupied))
        picks = rng.choice(len(occupied), size=take, replace=False)
        cells = [occupied[int(i)] for i in picks]
    elif method in (DasMethod.QUADRANTS, DasMethod.SQUARES):
        cells = _sample_sectors(occupied, window, method, count, rng)
    elif method is DasMethod.EDGES:
        cells = _sample_nearest(occupied, _edge_targets(origin, w), count,
                                _chebyshev_to_edge, rng)
    elif method is DasMethod.CORNERS:
        cells = _sample_nearest(occupied, _corner_targets(origin, w), count,
                                _euclidean_sq, rng)
    elif method is DasMethod.MEDOIDS:
        cells = kmedoids(occupied, count)
    else:
        raise ValueError(f"unknown sampling method {method}")
    return [archive.elite_at(c) for c in cells]


def _sample_sectors(occupied, window, method, count, rng):
    half = (window.size - 1) // 2
    cx = window.origin[0] + half
    cy = window.origin[1] + half
    sector_of = (_quadrant_sector if method is DasMethod.QUADRANTS
                 else _square_sector)
    buckets: dict[int, list[tuple[int, int]]] = {i: [] for i in range(4)}
    for cell in occupied:
        buckets[sector_of(cell[0] - cx, cell[1] - cy)].append(cell)

    chosen: list[tuple[int, int]] = []
    substitutes = 0
    for sector in range(min(count, 4)):
        pool = buckets[sector]
        if pool:
            chosen.append(pool[int(rng.integers(len(pool)))])
        else:
            substitutes += 1
    taken = set(chosen)
    for _ in range(substitutes):
        remaining = [c for c in occupied if c not in taken]
        if not remaining:
            break
        pick = remaining[int(rng.integers(len(remaining)))]
        taken.add(pick)
        chosen.append(pick)
    return chosen


def _edge_targets(origin, w):
    c0, r0 = origin
    return [("col", c0), ("col", c0 + w - 1), ("row", r0), ("row", r0 + w - 1)]


def _corner_targets(origin, w):
    c0, r0 = origin
    return [(c0, r0), (c0 + w - 1, r0), (c0, r0 + w - 1),
            (c0 + w - 1, r0 + w - 1)]


def _chebyshev_to_edge(cell, edge):
    axis, coord = edge
    return abs(cell[0] - coord) if axis == "col" else abs(cell[1] - coord)


def _euclidean_sq(cell, corner):
    return (cell[0] - corner[0]) ** 2 + (cell[1] - corner[1]) ** 2


def _sample_nearest(occupied, targets, count, metric, rng):
    """One pick per target: uniformly among the not-yet-chosen occupied
    cells nearest to it (distance 0 means on the edge / corner itself)."""
    chosen: list[tuple[int, int]] = []
    taken: set[tuple[int, int]] = set()
    for target in targets[:count]:
        best_d = None
        pool: list[tuple[int, int]] = []
        for cell in occupied:
            if cell in taken:
                continue
            d = metric(cell, target)
            if best_d is None or d < best_d:
                best_d = d
                pool = [cell]
            elif d == best_d:
                pool.append(cell)
        if not pool:
            continue
        pick = pool[int(rng.integers(len(pool)))]
        taken.add(pick)
        chosen.append(pick)
    return chosen


# ---------------------------------------------------------------------------
# session


@dataclass(frozen=True)
class SessionConfig:
    archive: ArchiveConfig = field(default_factory=ArchiveConfig)
    domain: DomainConfig = field(default_factory=DomainConfig)
    window_size: int = 9
    alternatives: int = 4
    evals_per_selection: int = 10_000
    initial_individuals: int = 100
    warmup_coverage: float = 0.01
    warmup_eval_cap: int = 500_000
    seed: int = 0

    def __post_init__(self):
        if self.window_size % 2 == 0 or self.window_size < 1:
            raise ValueError("window size must be odd and positive")
        if self.window_size > self.archive.resolution:
            raise ValueError("window larger than the archive grid")


@dataclass(frozen=True)
class SelectionRecord:
    s: int
    elite: Elite
    method: DasMethod


class Session:
    """One evolution run: twin archives, a window, and an eval budget.

    All mutation flows through a single generator owned by the session;
    a session is single-writer by contract.
    """

    def __init__(self, ds: DesignSpec, config: SessionConfig,
                 rng: np.random.Generator):
        self.ds = ds
        self.config = config
        self.rng = rng
        self.feasible = EliteArchive(config.archive, QualityRole.FITNESS)
        self.infeasible = EliteArchive(config.archive, QualityRole.FEASIBILITY)
        self.window: SelectionWindow | None = None
        self.history: list[SelectionRecord] = []
        self.last_alternatives: list[Elite] | None = None
        self.last_method: DasMethod | None = None
        self.warmup_evals = 0
        self.evals_done = 0

    # -- construction --------------------------------------------------

    def clone(self, rng: np.random.Generator) -> "Session":
        """A run-ready copy sharing this session's (immutable) elites."""
        other = Session(self.ds, self.config, rng)
        other.feasible = self.feasible.clone()
        other.infeasible = self.infeasible.clone()
        other.window = self.window
        other.warmup_evals = self.warmup_evals
        return other

    # -- internals -----------------------------------------------------

    def _insert(self, genome) -> Elite:
        evaluation = evaluate(genome, self.ds, self.config.domain)
        archive = self.feasible if evaluation.feasible else self.infeasible
        elite = archive.make_elite(genome, evaluation)
        archive.try_insert(elite)
        return elite

    def _pick_parent(self, first: EliteArchive, second: EliteArchive,
                     windowed: bool) -> Elite:
        for archive in (first, second):
            if windowed:
                cells = archive.occupied_cells_in(
                    self.window.origin, (self.window.size, self.window.size))
            else:
                cells = archive.occupied_order()
            if cells:
                cell = cells[int(self.rng.integers(len(cells)))]
                return archive.elite_at(cell)
        raise EngineError("both archives are empty in the parent region")

    def _evolve(self, n_evals: int, windowed: bool, observer=None) -> None:
        if n_evals < 1:
            raise ValueError("need at least one evaluation")
        if windowed and self.window is None:
            raise ProtocolError("no selection window placed yet")
        for i in range(1, n_evals + 1):
            # odd steps breed from the feasible archive, even from the
            # infeasible one; an in-window-empty archive falls back to
            # the other
            if i % 2 == 1:
                parent = self._pick_parent(self.feasible, self.infeasible,
                                           windowed)
            else:
                parent = self._pick_parent(self.infeasible, self.feasible,
                                           windowed)
            child = mutate(parent.genome, self.ds, self.rng,
                           self.config.domain)
            self._insert(child)
            self.evals_done += 1
            if observer is not None:
                observer(self)

    # -- lifecycle -----------------------------------------------------

    def seed_and_warm_up(self, observer=None) -> None:
        """Seed with random individuals, then run the unwindowed loop until
        the feasible archive passes the coverage gate."""
        cfg = self.config
        for _ in range(cfg.initial_individuals):
            genome = generate_initial(self.ds, self.rng, cfg.domain)
            self._insert(genome)
            self.warmup_evals += 1
            if observer is not None:
                observer(self)
        chunk = 200
        while self.feasible.coverage() < cfg.warmup_coverage:
            if self.warmup_evals >= cfg.warmup_eval_cap:
                raise WarmupError(
                    f"feasible coverage {self.feasible.coverage():.4%} after "
                    f"{self.warmup_evals} evaluations "
                    f"(cap {cfg.warmup_eval_cap})"
                )
            budget = min(chunk, cfg.warmup_eval_cap - self.warmup_evals)
            evals_before = self.evals_done
            self._evolve(budget, windowed=False, observer=observer)
            self.warmup_evals += self.evals_done - evals_before
            self.evals_done = evals_before
        self.window = initial_window(self.feasible, cfg.window_size)

    # -- interaction ---------------------------------------------------

    def sample_alternatives(self, method: DasMethod) -> list[Elite]:
        if self.window is None:
            raise ProtocolError("session not initialized")
        alts = sample_from_window(self.feasible, self.window, method,
                                  self.config.alternatives, self.rng)
        self.last_alternatives = alts
        self.last_method = method
        return alts

    def apply_selection(self, chosen: Elite, observer=None) -> None:
        if not self.last_alternatives:
            raise ProtocolError("no alternatives sampled")
        if not any(chosen is alt for alt in self.last_alternatives):
            raise ProtocolError("selection is not among the last alternatives")
        self.window = recenter(self.window, chosen.cell,
                               self.config.archive.resolution)
        method = self.last_method
        self.last_alternatives = None
        self.last_method = None
        self._evolve(self.config.evals_per_selection, windowed=True,
                     observer=observer)
        self.history.append(
            SelectionRecord(len(self.history) + 1, chosen, method))

    def expand_window(self, n_evals: int, observer=None) -> None:
        self._evolve(n_evals, windowed=True, observer=observer)

    def baseline_step(self, n_evals: int, observer=None) -> None:
        """Unguided expansion: parents from anywhere in the archives."""
        self._evolve(n_evals, windowed=False, observer=observer)

    @property
    def selections_done(self) -> int:
        return len(self.history)


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Independent generator streams off one seed: stream 0 is the
    warm-up, streams 1..n feed per-run evolution."""
    root = np.random.SeedSequence(seed)
    return np.random.default_rng(root.spawn(stream + 1)[stream])


def init_session(ds: DesignSpec, config: SessionConfig,
                 rng: np.random.Generator | None = None,
                 observer=None) -> Session:
    """Create, seed and warm a session.  Deterministic given the seed."""
    if rng is None:
        rng = stream_rng(config.seed, 0)
    session = Session(ds, config, rng)
    session.seed_and_warm_up(observer=observer)
    return session

"""Feature-map archive of elites over a discretized behavior space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .domain import Evaluation, LayoutGenome


class QualityRole(Enum):
    """Which scalar of an evaluation governs replacement in a cell."""
    FITNESS = "fitness"
    FEASIBILITY = "feasibility"


class InsertOutcome(Enum):
    INSERTED_EMPTY = "inserted_empty"
    REPLACED = "replaced"
    REJECTED = "rejected"


@dataclass(frozen=True)
class ArchiveConfig:
    resolution: int = 64
    bc1_range: tuple[float, float] = (0.0, 1.0)
    bc2_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        for lo, hi in (self.bc1_range, self.bc2_range):
            if not hi > lo:
                raise ValueError("behavior ranges must have positive width")


@dataclass(frozen=True)
class Elite:
    genome: LayoutGenome
    evaluation: Evaluation
    cell: tuple[int, int]    # (col, row)

    def quality(self, role: QualityRole) -> float:
        if role is QualityRole.FITNESS:
            return self.evaluation.fitness
        return self.evaluation.feasibility_score


def cell_of(bc: tuple[float, float], config: ArchiveConfig) -> tuple[int, int]:
    """Map a behavior pair to its grid cell; out-of-range values clamp to
    the boundary bins."""
    out = []
    for value, (lo, hi) in zip(bc, (config.bc1_range, config.bc2_range)):
        if not math.isfinite(value):
            raise ValueError(f"non-finite behavior value {value}")
        t = (value - lo) / (hi - lo)
        idx = int(math.floor(t * config.resolution))
        out.append(min(max(idx, 0), config.resolution - 1))
    return (out[0], out[1])


class EliteArchive:
    """One grid of elites: at most one per cell, best quality wins."""

    def __init__(self, config: ArchiveConfig,
                 quality_role: QualityRole = QualityRole.FITNESS):
        self.config = config
        self.quality_role = quality_role
        res = config.resolution
        self._cells: dict[tuple[int, int], Elite] = {}
        # occupancy indexed [row, col] so argwhere yields row-major order
        self._occ = np.zeros((res, res), dtype=bool)
        # cells never vacate once filled; insertion order gives O(1) picks
        self._occupied_order: list[tuple[int, int]] = []

    @property
    def resolution(self) -> int:
        return self.config.resolution

    def __len__(self) -> int:
        return len(self._cells)

    def elite_at(self, cell: tuple[int, int]) -> Elite | None:
        return self._cells.get(cell)

    def make_elite(self, genome: LayoutGenome, evaluation: Evaluation) -> Elite:
        return Elite(genome, evaluation, cell_of(evaluation.bc, self.config))

    def try_insert(self, candidate: Elite) -> InsertOutcome:
        """Empty cell: insert.  Occupied: strictly better quality replaces;
        ties keep the incumbent."""
        cell = candidate.cell
        quality = candidate.quality(self.quality_role)
        if not (math.isfinite(quality) and 0.0 <= quality <= 1.0):
            raise ValueError(f"quality {quality} outside [0, 1]")
        incumbent = self._cells.get(cell)
        if incumbent is None:
            self._cells[cell] = candidate
            self._occ[cell[1], cell[0]] = True
            self._occupied_order.append(cell)
            return InsertOutcome.INSERTED_EMPTY
        if quality > incumbent.quality(self.quality_role):
            self._cells[cell] = candidate
            return InsertOutcome.REPLACED
        return InsertOutcome.REJECTED

    def coverage(self) -> float:
        return len(self._cells) / (self.resolution ** 2)

    def qd_score(self) -> float:
        role = self.quality_role
        return sum(e.quality(role) for e in self._cells.values())

    def max_fitness(self) -> float | None:
        if not self._cells:
            return None
        role = self.quality_role
        return max(e.quality(role) for e in self._cells.values())

    def occupied_cells(self) -> list[tuple[int, int]]:
        """All occupied cells, row-major."""
        rows, cols = np.nonzero(self._occ)
        return list(zip(cols.tolist(), rows.tolist()))

    def occupied_in(self, origin: tuple[int, int],
                    size: tuple[int, int]) -> list[Elite]:
        """Elites whose cell lies in the rectangle, row-major order."""
        c0, r0 = origin
        w, h = size
        res = self.resolution
        if not (0 <= c0 and 0 <= r0 and c0 + w <= res and r0 + h <= res):
            raise ValueError("region outside the grid")
        rows, cols = np.nonzero(self._occ[r0:r0 + h, c0:c0 + w])
        return [self._cells[(c0 + c, r0 + r)]
                for r, c in zip(rows.tolist(), cols.tolist())]

    def occupied_cells_in(self, origin: tuple[int, int],
                          size: tuple[int, int]) -> list[tuple[int, int]]:
        c0, r0 = origin
        w, h = size
        rows, cols = np.nonzero(self._occ[r0:r0 + h, c0:c0 + w])
        return [(c0 + c, r0 + r) for r, c in zip(rows.tolist(), cols.tolist())]

    def elites(self) -> list[Elite]:
        """All elites, row-major."""
        return [self._cells[cell] for cell in self.occupied_cells()]

    def clone(self) -> "EliteArchive":
        """Snapshot copy sharing the (immutable) elites."""
        other = EliteArchive(self.config, self.quality_role)
        other._cells = dict(self._cells)
        other._occ = self._occ.copy()
        other._occupied_order = list(self._occupied_order)
        return other

    def occupied_order(self) -> list[tuple[int, int]]:
        """Occupied cells in first-insertion order (stable, append-only)."""
        return self._occupied_order

    def quality_grid(self) -> list[list[float | None]]:
        """resolution x resolution matrix (rows outer) of qualities."""
        res = self.resolution
        grid: list[list[float | None]] = [[None] * res for _ in range(res)]
        role = self.quality_role
        for (c, r), e in self._cells.items():
            grid[r][c] = e.quality(role)
        return grid

    def dump(self) -> list[dict]:
        """Occupied cells with quality and behavior, row-major."""
        role = self.quality_role
        return [
            {
                "cell": list(e.cell),
                "quality": e.quality(role),
                "fitness": e.evaluation.fitness,
                "feasibility": e.evaluation.feasibility_score,
                "bc": list(e.evaluation.bc),
            }
            for e in self.elites()
        ]

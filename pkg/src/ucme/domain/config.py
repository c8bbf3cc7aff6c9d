"""Tunable constants of the layout domain."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class DomainConfig:
    sites: int = 160                 # Voronoi sites per layout
    door_width: float = 0.8          # min wall length for doors / required adjacency
    window_width: float = 0.6        # min plot-border wall length for a window
    pathway_width: float = 0.5       # min wall length counted as passable
    area_floor: float = 0.6          # mean area precision below this is infeasible
    interior_cell_floor: float = 0.5 # min fraction of cells off the plot border

    # mutation parameters
    shift_magnitude: tuple[float, float] = (0.1, 1.0)
    jitter_fraction: tuple[float, float] = (0.01, 0.10)
    jitter_magnitude: tuple[float, float] = (0.1, 1.0)
    expand_rings: tuple[int, int] = (1, 3)
    erode_fraction: float = 0.3
    delete_opening_prob: float = 0.3
    adjacency_growth_budget: int = 20

    min_site_separation: float = 1e-6
    mirror_margin: float | None = None   # None: adaptive per side

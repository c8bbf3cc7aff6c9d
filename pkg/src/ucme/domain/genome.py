"""Evolvable layout: Voronoi sites, cell ownership, and wall openings."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .geometry import Tessellation

DOOR = "door"
ENTRANCE = "entrance"
WINDOW = "window"

UNASSIGNED = -1


class Opening(NamedTuple):
    kind: str                  # door | entrance | window
    edge: tuple[int, int]      # stable edge key (see Tessellation.edge_key)
    rooms: tuple[int, ...]     # two unit ids for doors, one otherwise


class LayoutGenome:
    """One layout individual.

    `assignment[c]` is the unit id owning cell c, or UNASSIGNED.  The
    tessellation derived from `sites` is cached and shared between parent
    and offspring whenever a mutation leaves the sites untouched; neither
    array is ever mutated in place after construction.
    """

    __slots__ = ("sites", "assignment", "openings", "_tess")

    def __init__(self, sites: np.ndarray, assignment: np.ndarray,
                 openings: tuple[Opening, ...] = (),
                 tess: Tessellation | None = None):
        self.sites = sites
        self.assignment = assignment
        self.openings = openings
        self._tess = tess

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def rooms_present(self) -> np.ndarray:
        """Unit ids with at least one cell, ascending."""
        present = self.assignment[self.assignment >= 0]
        return np.unique(present)

    def cells_of(self, room: int) -> np.ndarray:
        return np.nonzero(self.assignment == room)[0]

    def cached_tessellation(self) -> Tessellation | None:
        return self._tess

    def to_dict(self) -> dict:
        return {
            "sites": self.sites.tolist(),
            "assignment": self.assignment.tolist(),
            "openings": [
                {"kind": o.kind, "edge": list(o.edge), "rooms": list(o.rooms)}
                for o in self.openings
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LayoutGenome":
        openings = tuple(
            Opening(o["kind"], tuple(o["edge"]), tuple(o["rooms"]))
            for o in data["openings"]
        )
        return cls(
            np.asarray(data["sites"], dtype=np.float64),
            np.asarray(data["assignment"], dtype=np.int16),
            openings,
        )

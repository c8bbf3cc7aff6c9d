"""Design specification: the problem statement a layout must satisfy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path


class SpecError(ValueError):
    """Raised when a design-spec document fails validation."""


INTERIOR = "interior"
EXTERIOR = "exterior"


@dataclass(frozen=True)
class SpaceUnit:
    id: int
    name: str
    kind: str               # "interior" | "exterior"
    target_area: float      # m^2
    entrances: int = 0
    windows: int = 0


@dataclass(frozen=True)
class DesignSpec:
    """Required space units, adjacencies and plot bounds for one problem."""

    units: tuple[SpaceUnit, ...]
    adjacencies: tuple[tuple[int, int], ...]   # unordered id pairs, stored (lo, hi)
    width: float                               # plot bounds, meters
    height: float
    _by_id: dict[int, SpaceUnit] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {u.id: u for u in self.units})

    def unit(self, unit_id: int) -> SpaceUnit:
        return self._by_id[unit_id]

    @property
    def unit_ids(self) -> list[int]:
        return [u.id for u in self.units]

    @property
    def total_target_area(self) -> float:
        return sum(u.target_area for u in self.units)

    def degree(self, unit_id: int) -> int:
        return sum(1 for a, b in self.adjacencies if unit_id in (a, b))

    def to_document(self) -> dict:
        return {
            "bounds": {"width": self.width, "height": self.height},
            "units": [
                {
                    "id": u.id,
                    "name": u.name,
                    "kind": u.kind,
                    "area": u.target_area,
                    "entrances": u.entrances,
                    "windows": u.windows,
                }
                for u in self.units
            ],
            "adjacencies": [list(pair) for pair in self.adjacencies],
        }


def parse_design_spec(document: dict | str | bytes) -> DesignSpec:
    """Validate a design-spec document (parsed JSON or JSON text).

    Raises SpecError naming the offending field on any violation.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecError(f"document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise SpecError("document: expected a JSON object")

    bounds = document.get("bounds")
    if not isinstance(bounds, dict):
        raise SpecError("bounds: missing or not an object")
    width = _positive_number(bounds.get("width"), "bounds.width")
    height = _positive_number(bounds.get("height"), "bounds.height")

    raw_units = document.get("units")
    if not isinstance(raw_units, list) or not raw_units:
        raise SpecError("units: missing or empty")
    units: list[SpaceUnit] = []
    seen: set[int] = set()
    for i, raw in enumerate(raw_units):
        where = f"units[{i}]"
        if not isinstance(raw, dict):
            raise SpecError(f"{where}: expected an object")
        uid = raw.get("id")
        if not isinstance(uid, int) or isinstance(uid, bool):
            raise SpecError(f"{where}.id: expected an integer")
        if uid in seen:
            raise SpecError(f"{where}.id: duplicate id {uid}")
        seen.add(uid)
        name = raw.get("name")
        if not isinstance(name, str) or not name:
            raise SpecError(f"{where}.name: expected a non-empty string")
        kind = raw.get("kind")
        if kind not in (INTERIOR, EXTERIOR):
            raise SpecError(f"{where}.kind: expected 'interior' or 'exterior', got {kind!r}")
        area = _positive_number(raw.get("area"), f"{where}.area")
        entrances = _count(raw.get("entrances", 0), f"{where}.entrances")
        windows = _count(raw.get("windows", 0), f"{where}.windows")
        units.append(SpaceUnit(uid, name, kind, area, entrances, windows))

    raw_adj = document.get("adjacencies", [])
    if not isinstance(raw_adj, list):
        raise SpecError("adjacencies: expected a list of id pairs")
    adjacencies: list[tuple[int, int]] = []
    seen_pairs: set[tuple[int, int]] = set()
    for i, raw in enumerate(raw_adj):
        where = f"adjacencies[{i}]"
        if not isinstance(raw, (list, tuple)) or len(raw) != 2:
            raise SpecError(f"{where}: expected a pair of unit ids")
        a, b = raw
        for v in (a, b):
            if not isinstance(v, int) or isinstance(v, bool):
                raise SpecError(f"{where}: ids must be integers")
            if v not in seen:
                raise SpecError(f"{where}: unknown unit id {v}")
        if a == b:
            raise SpecError(f"{where}: a unit cannot be adjacent to itself")
        pair = (min(a, b), max(a, b))
        if pair in seen_pairs:
            raise SpecError(f"{where}: duplicate adjacency {pair}")
        seen_pairs.add(pair)
        adjacencies.append(pair)

    spec = DesignSpec(tuple(units), tuple(adjacencies), width, height)
    if spec.total_target_area >= width * height:
        raise SpecError(
            f"units: total target area {spec.total_target_area} m^2 does not fit "
            f"bounds {width}x{height} m"
        )
    return spec


def load_design_spec(path: str | Path) -> DesignSpec:
    return parse_design_spec(Path(path).read_text())


def apartment_spec() -> DesignSpec:
    """The bundled ten-unit apartment specification."""
    text = resources.files("ucme.specs").joinpath("apartment.json").read_text()
    return parse_design_spec(text)


def _positive_number(value, where: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SpecError(f"{where}: expected a number")
    if value <= 0:
        raise SpecError(f"{where}: must be positive, got {value}")
    return float(value)


def _count(value, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SpecError(f"{where}: expected a non-negative integer")
    if value < 0:
        raise SpecError(f"{where}: must be non-negative, got {value}")
    return value

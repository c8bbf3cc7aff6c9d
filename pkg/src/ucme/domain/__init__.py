"""The constrained architectural-layout domain."""

from .config import DomainConfig
from .evaluate import (
    Evaluation,
    EvaluationError,
    area_precision,
    compactness,
    evaluate,
    orthogonality,
    polygon_compactness,
    tessellation_of,
)
from .genome import DOOR, ENTRANCE, UNASSIGNED, WINDOW, LayoutGenome, Opening
from .geometry import Tessellation, TessellationError, build_tessellation
from .operators import (
    DESTRUCTION_OPS,
    destruction,
    generate_initial,
    mutate,
    place_openings,
    placement_order,
    repair,
)
from .spec import (
    DesignSpec,
    SpaceUnit,
    SpecError,
    apartment_spec,
    load_design_spec,
    parse_design_spec,
)

__all__ = [
    "DomainConfig", "Evaluation", "EvaluationError", "area_precision",
    "compactness", "evaluate", "orthogonality", "polygon_compactness",
    "tessellation_of", "DOOR", "ENTRANCE", "WINDOW", "UNASSIGNED",
    "LayoutGenome", "Opening", "Tessellation", "TessellationError",
    "build_tessellation", "DESTRUCTION_OPS", "destruction",
    "generate_initial", "mutate", "place_openings", "placement_order",
    "repair", "DesignSpec", "SpaceUnit", "SpecError", "apartment_spec",
    "load_design_spec", "parse_design_spec",
]

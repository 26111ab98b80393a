"""Entropic-geometry entanglement monotones for finite multipartite states."""
from .entropy import SubsystemEntropyCache, von_neumann_entropy
from .geometry import (
    convoluted_area,
    convoluted_metric,
    convoluted_volume,
    entanglement_content_E,
    filter_islands,
    geometry_report,
)
from .states import StateSpec, build_state
from .tensor import MultipartiteState, validate_density

__version__ = "0.1.0"

__all__ = [
    "MultipartiteState",
    "StateSpec",
    "SubsystemEntropyCache",
    "build_state",
    "convoluted_area",
    "convoluted_metric",
    "convoluted_volume",
    "entanglement_content_E",
    "filter_islands",
    "geometry_report",
    "validate_density",
    "von_neumann_entropy",
]

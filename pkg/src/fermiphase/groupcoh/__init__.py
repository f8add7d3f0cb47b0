"""Mod-2 cohomology rings of the catalog point groups, with total squares,
Kunneth products, restriction maps, and cited integral homology facts."""

from .catalog import HomologyFactTable, catalog_groups, catalog_ring, homology_fact
from .rings import (
    Monomial,
    Polynomial,
    RingMap,
    RingPresentation,
    kunneth,
    restriction,
    sq,
    total_square,
)

__all__ = [
    "HomologyFactTable",
    "Monomial",
    "Polynomial",
    "RingMap",
    "RingPresentation",
    "catalog_groups",
    "catalog_ring",
    "homology_fact",
    "kunneth",
    "restriction",
    "sq",
    "total_square",
]

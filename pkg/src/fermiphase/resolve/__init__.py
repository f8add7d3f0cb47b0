"""Resolutions, Ext charts, and module recognition."""

from .ext import ExtChart, ext_chart
from .margolis import margolis_split, split_once
from .named import (
    MatchResult,
    binom2,
    catalog_names,
    match_named,
    named_module,
    stunted_projective_module,
)
from .resolution import MinimalResolution, minimal_resolution

__all__ = [
    "ExtChart",
    "MatchResult",
    "MinimalResolution",
    "binom2",
    "catalog_names",
    "ext_chart",
    "margolis_split",
    "match_named",
    "minimal_resolution",
    "named_module",
    "split_once",
    "stunted_projective_module",
]

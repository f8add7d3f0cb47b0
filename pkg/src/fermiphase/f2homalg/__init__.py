"""Bit-exact linear algebra over F2 and graded modules over A(1) and E(1)."""

from .bitmat import F2Matrix, EchelonSpace, parity
from .algebra import FiniteGradedAlgebra, make_algebra
from .module import (
    GradedF2Space,
    FGModule,
    ModuleHom,
    verify_module,
    restrict_to_e1,
    direct_sum,
    suspension,
    hom_compose,
    free_module,
    hom_from_free,
    span_closure,
    submodule,
    quotient,
    module_to_json,
    module_from_json,
    canonical_json,
)

__all__ = [
    "F2Matrix",
    "EchelonSpace",
    "parity",
    "FiniteGradedAlgebra",
    "make_algebra",
    "GradedF2Space",
    "FGModule",
    "ModuleHom",
    "verify_module",
    "restrict_to_e1",
    "direct_sum",
    "suspension",
    "hom_compose",
    "free_module",
    "span_closure",
    "submodule",
    "quotient",
    "module_to_json",
    "module_from_json",
]

"""Shared error vocabulary. Every failure mode carries a stable machine code."""

from __future__ import annotations


class EngineError(Exception):
    code = "ENGINE_ERROR"

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.code)
        self.context = context


class IllFormed(EngineError):
    code = "ILL_FORMED"


class AlgebraMismatch(EngineError):
    code = "ALGEBRA_MISMATCH"


class TruncationExceeded(EngineError):
    code = "TRUNCATION_EXCEEDED"


class UnknownGroup(EngineError):
    code = "UNKNOWN_GROUP"


class NotARingMap(EngineError):
    code = "NOT_A_RING_MAP"


class NoFact(EngineError):
    code = "NO_FACT"


class Conflict(EngineError):
    code = "CONFLICT"


class Underdetermined(EngineError):
    code = "UNDERDETERMINED"


class MissingTable(EngineError):
    code = "MISSING_TABLE"


class StructureUnknown(EngineError):
    code = "STRUCTURE_UNKNOWN"


class RequiresTorsion(EngineError):
    code = "REQUIRES_TORSION"


class WindowExceeded(EngineError):
    code = "WINDOW_EXCEEDED"


class NoCollapse(EngineError):
    code = "NO_COLLAPSE"

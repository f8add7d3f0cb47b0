"""Catalog of point-group cohomology documents.

Each supported group ships as one JSON document holding its ring presentation
(or a recipe: residue cases, an alias, or a Kunneth product of other
documents) together with cited integral homology facts. Documents are
schema-validated at load and cached.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Dict, FrozenSet, Optional, Tuple

import jsonschema

from ..abelian import FinAbGroup
from ..errors import (
    IllFormed,
    NoFact,
    StructureUnknown,
    UnknownGroup,
    WindowExceeded,
)
from .rings import RingPresentation, kunneth

_DOC_FILES = {
    "Z/2": "z2.json",
    "Z/2xZ/2": "z2xz2.json",
    "Cn": "cn.json",
    "D2n": "d2n.json",
    "A4": "a4.json",
    "S4": "s4.json",
    "A5": "a5.json",
    "A4xZ/2": "a4xz2.json",
    "S4xZ/2": "s4xz2.json",
    "A5xZ/2": "a5xz2.json",
}

_PARAMETRIC = {"Cn", "D2n"}


def catalog_groups() -> Tuple[str, ...]:
    return tuple(_DOC_FILES)


@lru_cache(maxsize=None)
def _schema() -> dict:
    with resources.files("fermiphase.data.groups").joinpath("schema.json").open() as f:
        return json.load(f)


@lru_cache(maxsize=None)
def _doc(group: str) -> dict:
    if group not in _DOC_FILES:
        raise UnknownGroup("group is not in the catalog", group=group, known=sorted(_DOC_FILES))
    with resources.files("fermiphase.data.groups").joinpath(_DOC_FILES[group]).open() as f:
        doc = json.load(f)
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as e:
        raise IllFormed("group document fails its schema", group=group, detail=e.message)
    if doc.get("group") != group:
        raise IllFormed("group document names the wrong group", expected=group, found=doc.get("group"))
    shapes = [k for k in ("ring", "cases", "ring_alias", "ring_kunneth") if k in doc]
    if len(shapes) != 1:
        raise IllFormed("group document needs exactly one ring recipe", group=group, found=shapes)
    return doc


def _residue_case(n: int) -> str:
    if n % 2:
        return "odd"
    return "2mod4" if n % 4 == 2 else "0mod4"


def _check_n(group: str, n: Optional[int]) -> Optional[int]:
    if group in _PARAMETRIC:
        if not isinstance(n, int) or n < 1:
            raise IllFormed("this family needs a positive integer n", group=group, n=n)
        return n
    return None


def _build_inline(block: dict, group: str, params: dict, citations) -> RingPresentation:
    return RingPresentation(
        generators=[(g["name"], g["degree"]) for g in block["generators"]],
        window=block["window"],
        rewrites=[(r["lhs"], r["rhs"]) for r in block.get("rewrites", ())],
        steenrod=block["steenrod"],
        group=group,
        params=params,
        citations=citations,
    )


@lru_cache(maxsize=None)
def catalog_ring(group: str, n: Optional[int] = None) -> RingPresentation:
    doc = _doc(group)
    n = _check_n(group, n)
    citations = tuple(doc["citations"])
    if "ring" in doc:
        return _build_inline(doc["ring"], group, {}, citations)
    if "cases" in doc:
        case = _residue_case(n)
        block = doc["cases"].get(case)
        if block is None:
            raise IllFormed("document lacks the residue case", group=group, case=case)
        return _build_inline(block, group, {"n": n, "case": case}, citations)
    if "ring_alias" in doc:
        base = _doc(doc["ring_alias"])
        if "ring" not in base:
            raise IllFormed("alias target must carry an inline ring", group=group)
        return _build_inline(base["ring"], group, {"alias_of": doc["ring_alias"]}, citations)
    f1, f2 = doc["ring_kunneth"]
    ring = kunneth(catalog_ring(f1, n), catalog_ring(f2, n), group=group, citations=citations)
    return ring


@dataclass(frozen=True)
class HomologyFactTable:
    """Cited integral homology (or bordism) values for one group and twist."""

    group: str
    params: dict = field(compare=False)
    twist: Optional[str]
    coeff: str
    window: int
    entries: Dict[int, FinAbGroup] = field(compare=False)
    torsion_only: FrozenSet[int]
    citation: str

    def group_at(self, k: int) -> FinAbGroup:
        if k < 0:
            raise IllFormed("negative degree", degree=k)
        if k > self.window:
            raise WindowExceeded(
                "degree beyond the fact's window",
                degree=k,
                window=self.window,
                group=self.group,
            )
        if k in self.torsion_only:
            raise StructureUnknown(
                "entry known only to be torsion",
                group=self.group,
                degree=k,
                citation=self.citation,
            )
        return self.entries.get(k, FinAbGroup.trivial())

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "params": dict(self.params),
            "twist": self.twist,
            "coeff": self.coeff,
            "window": self.window,
            "entries": {str(k): v.to_json() for k, v in sorted(self.entries.items())},
            "torsion_only": sorted(self.torsion_only),
            "citation": self.citation,
        }


def _odd_part(n: int) -> int:
    while n % 2 == 0:
        n //= 2
    return n


def _value(v: dict, group: str, n: Optional[int]) -> FinAbGroup:
    kind = v["kind"]
    if kind == "cyclic-n":
        if n is None:
            raise IllFormed("value depends on n", group=group)
        return FinAbGroup.cyclic(n)
    if kind == "odd-part-of-n":
        if n is None:
            raise IllFormed("value depends on n", group=group)
        return FinAbGroup.cyclic(_odd_part(n))
    if kind == "free":
        return FinAbGroup.free(v["rank"])
    return FinAbGroup(v.get("free_rank", 0), tuple(v.get("torsion", ())))


def homology_fact(
    group: str,
    twist: Optional[str],
    coeff: str,
    n: Optional[int] = None,
) -> HomologyFactTable:
    doc = _doc(group)
    n = _check_n(group, n)
    for fact in doc.get("homology_facts", ()):
        if fact.get("twist") != twist or fact["coeff"] != coeff:
            continue
        entries = {
            int(k): _value(v, group, n) for k, v in fact["entries"].items()
        }
        entries = {k: g for k, g in entries.items() if not g.is_trivial()}
        params = {"n": n} if n is not None else {}
        return HomologyFactTable(
            group=group,
            params=params,
            twist=twist,
            coeff=coeff,
            window=fact["window"],
            entries=entries,
            torsion_only=frozenset(fact.get("torsion_only", ())),
            citation=fact["citation"],
        )
    raise NoFact(
        "no cited table for this request",
        group=group,
        twist=twist,
        coeff=coeff,
    )

"""Virtual bundle data and Thom modules over A(1) and E(1).

A VirtualBundleDatum is a formal difference of vector bundles over a
classifying space whose mod 2 cohomology is a catalog RingPresentation.
It tracks the rank, the total Stiefel-Whitney class (exact through a
stated degree), and formal multiples of (1 - L_g) for degree-one
generators g, which is what the coefficient-reduction rules act on.

thom_module builds the cohomology of the associated Thom spectrum as a
module over A(1) or E(1), with the Thom class U placed in degree 0.
Writing q = Sq1(w2) + w1^3, the action on U*p is

    Sq1(U*p) = U*(w1*p + Sq1 p)
    Sq2(U*p) = U*(w2*p + w1*Sq1 p + Sq2 p)
    Q0(U*p)  = U*(w1*p + Q0 p)
    Q1(U*p)  = U*(q*p + Q1 p)

so only w1 and w2 enter; higher classes are carried when the arithmetic
determines them but are never required.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .errors import AlgebraMismatch, IllFormed, TruncationExceeded
from .f2homalg import F2Matrix, FGModule, GradedF2Space, make_algebra, verify_module
from .groupcoh.rings import Monomial, Polynomial, RingPresentation

_MONO_FACTOR = re.compile(r"([A-Za-z]\w*)(?:\^(\d+))?$")


def _truncate(p: Polynomial, cutoff: int) -> Polynomial:
    ring = p.ring
    keep = frozenset(m for m in p.monomials if ring.mono_degree(m) <= cutoff)
    return Polynomial(ring, keep, normalize=False)


def _series_inverse(p: Polynomial, cutoff: int) -> Polynomial:
    """Inverse of a total class with constant term 1, through cutoff."""
    ring = p.ring
    tail = _truncate(p + ring.one(), cutoff)
    acc = ring.one()
    term = ring.one()
    while True:
        term = _truncate(term * tail, cutoff)
        if term.is_zero():
            return acc
        acc = acc + term


def _series_power(p: Polynomial, e: int, cutoff: int) -> Polynomial:
    if e < 0:
        return _series_inverse(_series_power(p, -e, cutoff), cutoff)
    acc = p.ring.one()
    base = _truncate(p, cutoff)
    while e:
        if e & 1:
            acc = _truncate(acc * base, cutoff)
        base = _truncate(base * base, cutoff)
        e >>= 1
    return acc


def _gen_degree(ring: RingPresentation, name: str) -> int:
    for g, d in ring.generators:
        if g == name:
            return d
    raise IllFormed("unknown generator", generator=name, ring=ring.group)


class VirtualBundleDatum:
    """Formal difference of bundles with tracked Whitney data.

    base_w is the total class of the non-formal part; formal_terms lists
    (coeff, g) contributions of coeff*(1 - L_g). The total class is their
    product, exact through known_through.
    """

    def __init__(
        self,
        base: RingPresentation,
        rank: int,
        base_w: Polynomial,
        known_through: int,
        formal_terms: Iterable[Tuple[int, str]] = (),
        certificates: Optional[Mapping[str, Mapping[str, str]]] = None,
        notes: Iterable[str] = (),
    ):
        if base_w.ring is not base:
            raise AlgebraMismatch("total class from another ring", ring=base.group)
        if not (0 <= known_through <= base.window):
            raise IllFormed(
                "known degree outside ring window", known=known_through, window=base.window
            )
        if base_w.homogeneous_part(0) != base.one():
            raise IllFormed("total class must have constant term 1")
        if base_w.max_degree() > known_through:
            raise IllFormed(
                "class data beyond stated accuracy",
                degree=base_w.max_degree(),
                known=known_through,
            )
        merged: Dict[str, int] = {}
        for c, g in formal_terms:
            if _gen_degree(base, g) != 1:
                raise IllFormed("formal difference needs a degree-one generator", generator=g)
            merged[g] = merged.get(g, 0) + int(c)
        self.base = base
        self.rank = int(rank)
        self.base_w = base_w
        self.known_through = int(known_through)
        self.formal_terms: Tuple[Tuple[int, str], ...] = tuple(
            (c, g) for g, c in sorted(merged.items()) if c
        )
        self.certificates: Dict[str, Dict[str, str]] = {
            k: dict(v) for k, v in (certificates or {}).items()
        }
        self.notes: Tuple[str, ...] = tuple(notes)
        self._w: Optional[Polynomial] = None

    @property
    def w(self) -> Polynomial:
        if self._w is None:
            acc = self.base_w
            for c, g in self.formal_terms:
                line = self.base.one() + self.base.gen(g)
                acc = _truncate(acc * _series_power(line, -c, self.known_through), self.known_through)
            self._w = acc
        return self._w

    def _class_part(self, d: int) -> Polynomial:
        if self.known_through < d:
            raise IllFormed(
                "Whitney class beyond stated accuracy", degree=d, known=self.known_through
            )
        return self.w.homogeneous_part(d)

    @property
    def w1(self) -> Polynomial:
        return self._class_part(1)

    @property
    def w2(self) -> Polynomial:
        return self._class_part(2)

    def is_plain_trivial(self) -> bool:
        return not self.formal_terms and self.base_w == self.base.one()

    def __add__(self, other: "VirtualBundleDatum") -> "VirtualBundleDatum":
        if not isinstance(other, VirtualBundleDatum):
            return NotImplemented
        if self.base is not other.base:
            raise AlgebraMismatch("bundles over different bases")
        known = min(self.known_through, other.known_through)
        if other.is_plain_trivial():
            certs = self.certificates
        elif self.is_plain_trivial():
            certs = other.certificates
        else:
            certs = {}
        return VirtualBundleDatum(
            self.base,
            self.rank + other.rank,
            _truncate(self.base_w * other.base_w, known),
            known,
            self.formal_terms + other.formal_terms,
            certs,
            self.notes + other.notes,
        )

    def __neg__(self) -> "VirtualBundleDatum":
        return VirtualBundleDatum(
            self.base,
            -self.rank,
            _series_inverse(self.base_w, self.known_through),
            self.known_through,
            tuple((-c, g) for c, g in self.formal_terms),
            None,
            self.notes,
        )

    def __sub__(self, other: "VirtualBundleDatum") -> "VirtualBundleDatum":
        return self + (-other)

    def __repr__(self):
        terms = " ".join(f"{c:+d}(1-L_{g})" for c, g in self.formal_terms)
        return f"VirtualBundleDatum({self.base.group}, rank={self.rank}, w={self.w.format()}{' ' + terms if terms else ''})"


def trivial_bundle(ring: RingPresentation, rank: int = 0) -> VirtualBundleDatum:
    return VirtualBundleDatum(ring, rank, ring.one(), ring.window)


def line_bundle(ring: RingPresentation, gen: str) -> VirtualBundleDatum:
    if _gen_degree(ring, gen) != 1:
        raise IllFormed("line bundle needs a degree-one generator", generator=gen)
    return VirtualBundleDatum(ring, 1, ring.one() + ring.gen(gen), ring.window)


def one_minus_line(ring: RingPresentation, gen: str, coeff: int = 1) -> VirtualBundleDatum:
    """coeff copies of (1 - L_gen), kept as a formal term for normalization."""
    terms = ((coeff, gen),) if coeff else ()
    return VirtualBundleDatum(ring, 0, ring.one(), ring.window, terms)


def bundle_from_classes(
    ring: RingPresentation,
    rank: int,
    w1: Polynomial,
    w2: Polynomial,
    known_through: int = 2,
    certificates: Optional[Mapping[str, Mapping[str, str]]] = None,
) -> VirtualBundleDatum:
    for p, d in ((w1, 1), (w2, 2)):
        if p.ring is not ring:
            raise AlgebraMismatch("class from another ring", ring=ring.group)
        if not p.is_zero() and (not p.is_homogeneous() or p.degree() != d):
            raise IllFormed("Whitney class of the wrong degree", expected=d, value=p.format())
        if not p.is_zero() and known_through < d:
            raise IllFormed("class data beyond stated accuracy", degree=d, known=known_through)
    return VirtualBundleDatum(
        ring, rank, ring.one() + w1 + w2, known_through, (), certificates
    )


def _parse_monomial(ring: RingPresentation, text: str) -> Monomial:
    text = text.strip()
    if text == "1":
        return ring.mono({})
    exps: Dict[str, int] = {}
    for factor in text.split("*"):
        m = _MONO_FACTOR.match(factor.strip())
        if m is None:
            raise IllFormed("unparseable monomial", text=text)
        g, e = m.group(1), int(m.group(2) or 1)
        exps[g] = exps.get(g, 0) + e
    return ring.mono(exps)


def poly_from_strings(ring: RingPresentation, entries: Sequence[str]) -> Polynomial:
    acc: set = set()
    for s in entries:
        acc ^= {_parse_monomial(ring, s)}
    return Polynomial(ring, acc)


def bundle_from_literal(ring: RingPresentation, literal: Mapping) -> VirtualBundleDatum:
    """Bundle from config data: {rank, w1, w2, certificates?, terms?}."""
    unknown = set(literal) - {"rank", "w1", "w2", "certificates", "terms"}
    if unknown:
        raise IllFormed("unknown bundle literal keys", keys=sorted(unknown))
    if "rank" not in literal:
        raise IllFormed("bundle literal needs a rank")
    classes = {}
    for key, d in (("w1", 1), ("w2", 2)):
        entries = literal.get(key, [])
        for s in entries:
            mono = _parse_monomial(ring, s)
            if ring.mono_degree(mono) != d:
                raise IllFormed("monomial of the wrong degree", entry=s, expected=d)
        classes[key] = poly_from_strings(ring, entries)
    v = bundle_from_classes(
        ring,
        int(literal["rank"]),
        classes["w1"],
        classes["w2"],
        certificates=literal.get("certificates"),
    )
    for c, g in literal.get("terms", ()):
        v = v + one_minus_line(ring, g, int(c))
    return v


def bundle_det(v: VirtualBundleDatum) -> VirtualBundleDatum:
    """Determinant line bundle: rank 1, total class 1 + w1."""
    return VirtualBundleDatum(v.base, 1, v.base.one() + v.w1, v.base.window)


def sw_total(v: VirtualBundleDatum) -> Polynomial:
    return v.w


def q1_datum(v: VirtualBundleDatum) -> Polynomial:
    """The degree-3 class Sq1(w2) + w1^3 governing the Q1 action on U."""
    ring = v.base
    w2 = v.w2
    sq1w2 = ring.sq(1, w2) if not w2.is_zero() else ring.zero()
    return sq1w2 + v.w1 ** 3


# --------------------------------------------------------------- detection


@dataclass(frozen=True)
class StructureVerdict:
    verdict: str
    evidence: str


def _verdict(flag: bool, yes_ev: str, no_ev: str) -> StructureVerdict:
    return StructureVerdict("yes" if flag else "no", yes_ev if flag else no_ev)


def detect_structure(v: VirtualBundleDatum) -> Dict[str, StructureVerdict]:
    """Three-valued tangential-structure detection from w1 and w2."""
    ring = v.base
    w1, w2 = v.w1, v.w2
    fm = w2 + w1 * w1
    out = {
        "spin": _verdict(
            w1.is_zero() and w2.is_zero(),
            "w1 = 0 and w2 = 0",
            f"w1 = {w1.format()}, w2 = {w2.format()}",
        ),
        "pin_minus": _verdict(
            fm.is_zero(), "w2 + w1^2 = 0", f"w2 + w1^2 = {fm.format()}, nonzero"
        ),
        "pin_plus": _verdict(w2.is_zero(), "w2 = 0", f"w2 = {w2.format()}, nonzero"),
    }
    cert = v.certificates.get("pin_c")
    if cert is not None:
        verdict = cert.get("verdict")
        if verdict not in ("yes", "no"):
            raise IllFormed("certificate verdict must be yes or no", got=verdict)
        out["pin_c"] = StructureVerdict(verdict, f"certificate: {cert.get('citation', '')}")
    elif w1.is_zero() and w2.is_zero():
        out["pin_c"] = StructureVerdict("yes", "w1 = 0 and w2 = 0: spin implies pin^c")
    elif w1.is_zero() and not ring.sq(1, w2).is_zero():
        obstruction = ring.sq(1, w2).format()
        out["pin_c"] = StructureVerdict(
            "no", f"orientable with Sq1(w2) = {obstruction}, so w2 has no integral lift"
        )
    else:
        out["pin_c"] = StructureVerdict(
            "unknown", "no certificate and the mod 2 obstruction test is inconclusive"
        )
    return out


# ----------------------------------------------------------- normalization


_CLASS_MODULUS = {"D": 4, "A": 2}


def normalize_bundle(v: VirtualBundleDatum, symmetry_class: str) -> VirtualBundleDatum:
    """Reduce formal (1 - L_g) coefficients by the structure-preserving rule.

    Class D drops 4-fold sums (spin), class A drops 2-fold sums (spin^c).
    The identity is returned when no coefficient changes.
    """
    if symmetry_class not in _CLASS_MODULUS:
        raise IllFormed("symmetry class must be D or A", got=symmetry_class)
    if not v.formal_terms:
        return v
    mod = _CLASS_MODULUS[symmetry_class]
    reduced = tuple((c % mod, g) for c, g in v.formal_terms)
    if reduced == v.formal_terms:
        return v
    changes = ", ".join(
        f"{g}: {c} -> {c % mod}" for c, g in v.formal_terms if c % mod != c
    )
    note = f"reduced (1 - L) coefficients mod {mod} for class {symmetry_class}: {changes}"
    return VirtualBundleDatum(
        v.base,
        v.rank,
        v.base_w,
        v.known_through,
        reduced,
        v.certificates,
        v.notes + (note,),
    )


# ------------------------------------------------------------ Thom modules


@dataclass
class ThomModule:
    module: FGModule
    bundle: VirtualBundleDatum
    reduced: bool
    rank_shift: int
    thom_class: str = "U"


def thom_module(
    v: VirtualBundleDatum,
    top: int,
    reduced: bool = True,
    algebra: str = "A(1)",
) -> ThomModule:
    """Cohomology of the Thom spectrum through degree top, U in degree 0.

    For the plainly trivial bundle the basepoint summand splits off and
    `reduced` drops the unit class; any other datum keeps all of U*H.
    """
    ring = v.base
    if top < 0:
        raise IllFormed("negative degree cap", top=top)
    if top > ring.window:
        raise TruncationExceeded(
            "cap beyond the verified ring window", top=top, window=ring.window
        )
    if v.known_through < 2:
        raise IllFormed(
            "Thom module needs w1 and w2", known=v.known_through
        )
    alg = make_algebra(algebra)
    w1, w2 = v.w1, v.w2

    if algebra == "A(1)":
        def sq1_rule(p: Polynomial) -> Polynomial:
            return w1 * p + ring.sq(1, p)

        def sq2_rule(p: Polynomial) -> Polynomial:
            return w2 * p + w1 * ring.sq(1, p) + ring.sq(2, p)

        rules = {"1": (1, sq1_rule), "2": (2, sq2_rule)}
    else:
        q = q1_datum(v)

        def q0_rule(p: Polynomial) -> Polynomial:
            return w1 * p + ring.sq(1, p)

        def q1_rule(p: Polynomial) -> Polynomial:
            return q * p + ring.sq(1, ring.sq(2, p)) + ring.sq(2, ring.sq(1, p))

        rules = {"0": (1, q0_rule), "1": (3, q1_rule)}

    drop_unit = reduced and v.is_plain_trivial()
    dims: Dict[int, int] = {}
    labels: Dict[int, list] = {}
    for t in range(top + 1):
        if t == 0 and drop_unit:
            continue
        monos = ring.basis(t)
        dims[t] = len(monos)
        labels[t] = [
            "U" if ring.mono_degree(m) == 0 and all(e == 0 for e in m) else f"U*{ring.format_monomial(m)}"
            for m in monos
        ]

    action: Dict[str, Dict[int, F2Matrix]] = {}
    for g, (shift, rule) in rules.items():
        mats: Dict[int, F2Matrix] = {}
        for t in range(top - shift + 1):
            if t == 0 and drop_unit:
                continue
            cols = ring.dim(t)
            rows = ring.dim(t + shift)
            if cols == 0 or rows == 0:
                continue
            col_bits = []
            for i in range(cols):
                p = ring.from_coords(1 << i, t)
                img = rule(p).homogeneous_part(t + shift)
                col_bits.append(ring.coords(img, t + shift))
            data = [
                sum(((col_bits[j] >> r) & 1) << j for j in range(cols))
                for r in range(rows)
            ]
            mats[t] = F2Matrix(rows, cols, data)
        action[g] = mats

    lo = 1 if drop_unit else 0
    m = FGModule(
        alg,
        GradedF2Space(dims, labels, window=(min(lo, top), top)),
        action,
        truncation=top,
        name=f"thom({ring.group})",
    )
    failures = verify_module(m)
    if failures:
        raise IllFormed("Thom action violates the algebra relations", failures=failures)
    return ThomModule(module=m, bundle=v, reduced=reduced, rank_shift=v.rank)

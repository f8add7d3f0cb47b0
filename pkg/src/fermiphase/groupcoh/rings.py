"""Mod-2 group cohomology rings as finite presentations with total squares.

A ring is generators plus degree-homogeneous rewrite rules; elements are sets
of monomials (coefficients live in F2, so addition is symmetric difference).
Every polynomial is kept in normal form, which `validate` proves unique up to
the ring's degree window by exhaustive reduction-order comparison.
"""

from __future__ import annotations

import itertools
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..errors import AlgebraMismatch, IllFormed, NotARingMap, TruncationExceeded
from ..f2homalg.bitmat import F2Matrix

Monomial = Tuple[int, ...]

_STEP_CAP = 200_000


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def _mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _mono_div(num: Monomial, den: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(num, den))


class Polynomial:
    """Homogeneous or mixed F2 combination of normal-form monomials."""

    __slots__ = ("ring", "monomials")

    def __init__(self, ring: "RingPresentation", monomials: Iterable[Monomial], normalize: bool = True):
        self.ring = ring
        monos = frozenset(monomials)
        if normalize:
            monos = ring.normal_form(monos)
        self.monomials: FrozenSet[Monomial] = monos

    def _check(self, other: "Polynomial") -> None:
        if self.ring is not other.ring:
            raise AlgebraMismatch(
                "polynomials over different ring presentations",
                left=self.ring.group,
                right=other.ring.group,
            )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        return Polynomial(self.ring, self.monomials ^ other.monomials, normalize=False)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        acc: set = set()
        for a in self.monomials:
            for b in other.monomials:
                acc ^= {_mono_mul(a, b)}
        return Polynomial(self.ring, acc)

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            raise IllFormed("negative exponent", exponent=e)
        out = self.ring.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base_needed = e >> 1
            if base_needed:
                base = base * base
            e >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.ring is other.ring
            and self.monomials == other.monomials
        )

    def __hash__(self):
        return hash((id(self.ring), self.monomials))

    def is_zero(self) -> bool:
        return not self.monomials

    def is_homogeneous(self) -> bool:
        degs = {self.ring.mono_degree(m) for m in self.monomials}
        return len(degs) <= 1

    def degree(self) -> int:
        """Degree of a nonzero homogeneous polynomial."""
        degs = {self.ring.mono_degree(m) for m in self.monomials}
        if len(degs) != 1:
            raise IllFormed("degree of a zero or mixed polynomial", parts=sorted(degs))
        return degs.pop()

    def max_degree(self) -> int:
        return max((self.ring.mono_degree(m) for m in self.monomials), default=0)

    def homogeneous_part(self, d: int) -> "Polynomial":
        part = {m for m in self.monomials if self.ring.mono_degree(m) == d}
        return Polynomial(self.ring, part, normalize=False)

    def __repr__(self):
        return f"<{self.format()}>"

    def format(self) -> str:
        if not self.monomials:
            return "0"
        key = lambda m: (self.ring.mono_degree(m), m)
        return " + ".join(self.ring.format_monomial(m) for m in sorted(self.monomials, key=key))


class RingPresentation:
    """Graded F2 algebra with rewrite rules and a total square per generator."""

    def __init__(
        self,
        generators: Sequence[Tuple[str, int]],
        window: int,
        rewrites: Sequence[Tuple[Mapping[str, int], Sequence[Mapping[str, int]]]] = (),
        steenrod: Mapping[str, Sequence[Mapping[str, int]]] = None,
        group: str = "",
        params: Optional[dict] = None,
        citations: Sequence[str] = (),
        validate: bool = True,
    ):
        self.generators: Tuple[Tuple[str, int], ...] = tuple((str(g), int(d)) for g, d in generators)
        self.window = int(window)
        self.group = group
        self.params = dict(params or {})
        self.citations: Tuple[str, ...] = tuple(citations)
        self._index = {g: i for i, (g, _) in enumerate(self.generators)}
        if len(self._index) != len(self.generators):
            raise IllFormed("duplicate generator name", generators=self.generators)
        self.degrees = tuple(d for _, d in self.generators)
        if any(d < 1 for d in self.degrees):
            raise IllFormed("generator degrees must be positive", degrees=self.degrees)
        self.rewrites: Tuple[Tuple[Monomial, FrozenSet[Monomial]], ...] = tuple(
            (self.mono(lhs), frozenset(self.mono(r) for r in rhs)) for lhs, rhs in rewrites
        )
        self._steenrod_raw: Dict[str, FrozenSet[Monomial]] = {
            g: frozenset(self.mono(m) for m in entry) for g, entry in (steenrod or {}).items()
        }
        self._nf_cache: Dict[Monomial, FrozenSet[Monomial]] = {}
        self._nf_running: set = set()
        self._basis_cache: Dict[int, Tuple[Monomial, ...]] = {}
        self._steenrod: Optional[Dict[int, Polynomial]] = None
        if validate:
            self.validate()

    # monomial helpers

    def mono(self, exps: Mapping[str, int]) -> Monomial:
        vec = [0] * len(self.generators)
        for g, e in exps.items():
            if g not in self._index:
                raise IllFormed("unknown generator", generator=g, ring=self.group)
            if e < 0:
                raise IllFormed("negative exponent", generator=g, exponent=e)
            vec[self._index[g]] = e
        return tuple(vec)

    def mono_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for (g, _), e in zip(self.generators, m):
            if e == 1:
                parts.append(g)
            elif e > 1:
                parts.append(f"{g}^{e}")
        return "*".join(parts) if parts else "1"

    # element constructors

    def zero(self) -> Polynomial:
        return Polynomial(self, (), normalize=False)

    def one(self) -> Polynomial:
        return Polynomial(self, ((0,) * len(self.generators),), normalize=False)

    def gen(self, name: str) -> Polynomial:
        return Polynomial(self, (self.mono({name: 1}),))

    def monomial(self, exps: Mapping[str, int]) -> Polynomial:
        return Polynomial(self, (self.mono(exps),))

    def poly(self, terms: Iterable[Mapping[str, int]]) -> Polynomial:
        acc: set = set()
        for t in terms:
            acc ^= {self.mono(t)}
        return Polynomial(self, acc)

    # rewriting

    def _reduce_once(self, m: Monomial) -> Optional[FrozenSet[Monomial]]:
        for lhs, rhs in self.rewrites:
            if _mono_divides(lhs, m):
                q = _mono_div(m, lhs)
                return frozenset(_mono_mul(q, r) for r in rhs)
        return None

    def _nf_mono(self, m: Monomial) -> FrozenSet[Monomial]:
        hit = self._nf_cache.get(m)
        if hit is not None:
            return hit
        if m in self._nf_running:
            raise IllFormed("rewriting loops", monomial=self.format_monomial(m))
        rep = self._reduce_once(m)
        if rep is None:
            out: FrozenSet[Monomial] = frozenset((m,))
        else:
            self._nf_running.add(m)
            try:
                acc: set = set()
                for t in rep:
                    acc ^= self._nf_mono(t)
                out = frozenset(acc)
            finally:
                self._nf_running.discard(m)
        self._nf_cache[m] = out
        return out

    def normal_form(
        self,
        monomials: Iterable[Monomial],
        chooser: Optional[Callable[[List[Tuple[Monomial, int]]], Tuple[Monomial, int]]] = None,
    ) -> FrozenSet[Monomial]:
        """Reduce a monomial set to normal form. A chooser picks which
        (monomial, rule index) redex fires next; the default path is cached."""
        if chooser is None:
            acc: set = set()
            for m in monomials:
                acc ^= self._nf_mono(m)
            return frozenset(acc)
        work = set(monomials)
        for _ in range(_STEP_CAP):
            redexes = sorted(
                (m, i)
                for m in work
                for i, (lhs, _) in enumerate(self.rewrites)
                if _mono_divides(lhs, m)
            )
            if not redexes:
                return frozenset(work)
            m, i = chooser(redexes)
            lhs, rhs = self.rewrites[i]
            q = _mono_div(m, lhs)
            work.remove(m)
            for r in rhs:
                t = _mono_mul(q, r)
                if t in work:
                    work.remove(t)
                else:
                    work.add(t)
        raise IllFormed("rewriting exceeded the step cap", cap=_STEP_CAP)

    # graded bases

    def _exponent_vectors(self, d: int):
        n = len(self.degrees)

        def rec(i: int, left: int, prefix: List[int]):
            if i == n:
                if left == 0:
                    yield tuple(prefix)
                return
            step = self.degrees[i]
            for e in range(left // step + 1):
                prefix.append(e)
                yield from rec(i + 1, left - e * step, prefix)
                prefix.pop()

        yield from rec(0, d, [])

    def basis(self, d: int) -> Tuple[Monomial, ...]:
        if d > self.window:
            raise TruncationExceeded("degree beyond the ring's verified window", degree=d, window=self.window)
        if d < 0:
            return ()
        cached = self._basis_cache.get(d)
        if cached is None:
            cached = tuple(
                m for m in self._exponent_vectors(d) if self._reduce_once(m) is None
            )
            self._basis_cache[d] = cached
        return cached

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def coords(self, p: Polynomial, d: int) -> int:
        if p.ring is not self:
            raise AlgebraMismatch("polynomial from another ring", ring=self.group)
        if not p.is_zero() and p.degree() != d:
            raise IllFormed("polynomial degree does not match", expected=d)
        index = {m: i for i, m in enumerate(self.basis(d))}
        bits = 0
        for m in p.monomials:
            bits |= 1 << index[m]
        return bits

    def from_coords(self, bits: int, d: int) -> Polynomial:
        b = self.basis(d)
        if bits >> len(b):
            raise IllFormed("coordinate bits outside the basis", degree=d, dim=len(b))
        return Polynomial(self, (m for i, m in enumerate(b) if (bits >> i) & 1), normalize=False)

    # Steenrod operations

    def _steenrod_polys(self) -> Dict[int, Polynomial]:
        if self._steenrod is None:
            self._steenrod = {
                self._index[g]: Polynomial(self, raw) for g, raw in self._steenrod_raw.items()
            }
        return self._steenrod

    def _bounded_mul(self, A: FrozenSet[Monomial], B: FrozenSet[Monomial], cutoff: int) -> FrozenSet[Monomial]:
        acc: set = set()
        for a in A:
            da = self.mono_degree(a)
            for b in B:
                if da + self.mono_degree(b) > cutoff:
                    continue
                acc ^= {_mono_mul(a, b)}
        return self.normal_form(acc)

    def _total_square_monomial(self, m: Monomial, cutoff: int) -> FrozenSet[Monomial]:
        squares = self._steenrod_polys()
        out: FrozenSet[Monomial] = frozenset(((0,) * len(self.generators),))
        for i, e in enumerate(m):
            if not e:
                continue
            base = squares[i].monomials
            power: FrozenSet[Monomial] = frozenset(((0,) * len(self.generators),))
            b = base
            k = e
            while k:
                if k & 1:
                    power = self._bounded_mul(power, b, cutoff)
                k >>= 1
                if k:
                    b = self._bounded_mul(b, b, cutoff)
            out = self._bounded_mul(out, power, cutoff)
            if not out:
                break
        return out

    def total_square(self, p: Polynomial, cutoff: Optional[int] = None) -> Polynomial:
        if p.ring is not self:
            raise AlgebraMismatch("polynomial from another ring", ring=self.group)
        if p.is_zero():
            return self.zero()
        if cutoff is None:
            cutoff = 2 * p.max_degree()
        if cutoff > self.window:
            raise TruncationExceeded(
                "total square exceeds the verified window",
                needed=cutoff,
                window=self.window,
            )
        acc: set = set()
        for m in p.monomials:
            acc ^= self._total_square_monomial(m, cutoff)
        return Polynomial(self, acc, normalize=False)

    def sq(self, i: int, p: Polynomial) -> Polynomial:
        if i < 0:
            raise IllFormed("negative square index", index=i)
        if p.is_zero():
            return self.zero()
        if not p.is_homogeneous():
            raise IllFormed("squares act on homogeneous polynomials", polynomial=p.format())
        d = p.degree()
        if d + i > self.window:
            raise TruncationExceeded(
                "square lands beyond the verified window", degree=d + i, window=self.window
            )
        return self.total_square(p, cutoff=d + i).homogeneous_part(d + i)

    # validation

    def validate(self) -> None:
        for lhs, rhs in self.rewrites:
            d = self.mono_degree(lhs)
            if any(self.mono_degree(r) != d for r in rhs):
                raise IllFormed(
                    "rewrite rule mixes degrees",
                    rule=self.format_monomial(lhs),
                    degree=d,
                )
        for g, deg in self.generators:
            raw = self._steenrod_raw.get(g)
            if raw is None:
                raise IllFormed("generator lacks a total square", generator=g)
            by_deg: Dict[int, set] = {}
            for m in raw:
                by_deg.setdefault(self.mono_degree(m), set()).add(m)
            if by_deg.get(deg) != {self.mono({g: 1})}:
                raise IllFormed("total square must start with the generator", generator=g)
            if by_deg.get(2 * deg) != {self.mono({g: 2})}:
                raise IllFormed("total square must end with the generator squared", generator=g)
            if any(d < deg or d > 2 * deg for d in by_deg):
                raise IllFormed("total square has parts outside [deg, 2 deg]", generator=g)
        if self.degrees and 2 * max(self.degrees) > self.window:
            raise IllFormed(
                "window too small for the generators' squares",
                window=self.window,
            )
        self._check_confluence()
        self._check_square_closure()

    def _check_confluence(self) -> None:
        if not self.rewrites:
            return
        first = lambda redexes: redexes[0]
        last = lambda redexes: redexes[-1]
        for d in range(self.window + 1):
            for m in self._exponent_vectors(d):
                if self._reduce_once(m) is None:
                    continue
                ms = frozenset((m,))
                a = self.normal_form(ms)
                if self.normal_form(ms, chooser=first) != a or self.normal_form(ms, chooser=last) != a:
                    raise IllFormed(
                        "rewriting is not confluent",
                        monomial=self.format_monomial(m),
                        degree=d,
                    )

    def _check_square_closure(self) -> None:
        for lhs, rhs in self.rewrites:
            d = self.mono_degree(lhs)
            if 2 * d > self.window:
                continue
            left = self._total_square_monomial(lhs, 2 * d)
            right: set = set()
            for r in self.normal_form(rhs):
                right ^= self._total_square_monomial(r, 2 * d)
            if left != frozenset(right):
                raise IllFormed(
                    "relation is not closed under the total square",
                    rule=self.format_monomial(lhs),
                )

    def __repr__(self):
        gens = ", ".join(f"{g}:{d}" for g, d in self.generators)
        return f"<ring {self.group or '?'} [{gens}] window {self.window}>"


def total_square(p: Polynomial) -> Polynomial:
    return p.ring.total_square(p)


def sq(i: int, p: Polynomial) -> Polynomial:
    return p.ring.sq(i, p)


def kunneth(r1: RingPresentation, r2: RingPresentation, group: str = "", citations: Sequence[str] = ()) -> RingPresentation:
    """Tensor product of presentations; colliding names get a numeric suffix."""
    taken = {g for g, _ in r1.generators}
    renamed: Dict[str, str] = {}
    gens = list(r1.generators)
    for g, d in r2.generators:
        name = g
        k = 2
        while name in taken:
            name = f"{g}{k}"
            k += 1
        taken.add(name)
        renamed[g] = name
        gens.append((name, d))
    n1 = len(r1.generators)
    n2 = len(r2.generators)

    def lift1(m: Monomial) -> Dict[str, int]:
        return {r1.generators[i][0]: e for i, e in enumerate(m) if e}

    def lift2(m: Monomial) -> Dict[str, int]:
        return {renamed[r2.generators[i][0]]: e for i, e in enumerate(m) if e}

    rewrites = [(lift1(lhs), [lift1(r) for r in rhs]) for lhs, rhs in r1.rewrites]
    rewrites += [(lift2(lhs), [lift2(r) for r in rhs]) for lhs, rhs in r2.rewrites]
    steenrod = {g: [lift1(m) for m in raw] for g, raw in r1._steenrod_raw.items()}
    steenrod.update(
        {renamed[g]: [lift2(m) for m in raw] for g, raw in r2._steenrod_raw.items()}
    )
    return RingPresentation(
        generators=gens,
        window=min(r1.window, r2.window),
        rewrites=rewrites,
        steenrod=steenrod,
        group=group or f"{r1.group}x{r2.group}",
        params={**r1.params, **r2.params},
        citations=tuple(citations) or r1.citations + r2.citations,
    )


class RingMap:
    """Degree-preserving ring homomorphism given by generator images."""

    def __init__(self, source: RingPresentation, target: RingPresentation, images: Mapping[str, Polynomial]):
        self.source = source
        self.target = target
        self.images: Dict[str, Polynomial] = dict(images)
        self._matrices: Dict[int, F2Matrix] = {}

    def apply(self, p: Polynomial) -> Polynomial:
        if p.ring is not self.source:
            raise AlgebraMismatch("polynomial not over the map's source")
        out = self.target.zero()
        for m in p.monomials:
            term = self.target.one()
            for (g, _), e in zip(self.source.generators, m):
                if e:
                    term = term * (self.images[g] ** e)
            out = out + term
        return out

    def matrix(self, d: int) -> F2Matrix:
        cached = self._matrices.get(d)
        if cached is None:
            src = self.source.basis(d)
            entries = []
            for j, m in enumerate(src):
                img = self.apply(Polynomial(self.source, (m,), normalize=False))
                bits = self.target.coords(img, d)
                while bits:
                    low = bits & -bits
                    entries.append((low.bit_length() - 1, j))
                    bits ^= low
            cached = F2Matrix.from_entries(self.target.dim(d), len(src), entries)
            self._matrices[d] = cached
        return cached

    def iso_in_window(self, n: int) -> bool:
        for d in range(n + 1):
            if self.source.dim(d) != self.target.dim(d):
                return False
            if self.matrix(d).rank() != self.source.dim(d):
                return False
        return True


def restriction(
    source: RingPresentation,
    target: RingPresentation,
    generator_images: Mapping[str, Polynomial],
) -> RingMap:
    names = [g for g, _ in source.generators]
    missing = [g for g in names if g not in generator_images]
    extra = [g for g in generator_images if g not in set(names)]
    if missing or extra:
        raise IllFormed("generator images do not match the source", missing=missing, extra=extra)
    for (g, d) in source.generators:
        img = generator_images[g]
        if img.ring is not target:
            raise AlgebraMismatch("image not over the target ring", generator=g)
        if not img.is_zero() and (not img.is_homogeneous() or img.degree() != d):
            raise NotARingMap("image has the wrong degree", generator=g, degree=d)
    rmap = RingMap(source, target, generator_images)
    for lhs, rhs in source.rewrites:
        left = rmap.apply(Polynomial(source, (lhs,), normalize=False))
        right = rmap.apply(Polynomial(source, rhs, normalize=False))
        if left + right != target.zero():
            raise NotARingMap(
                "relation does not map to zero",
                rule=source.format_monomial(lhs),
            )
    return rmap

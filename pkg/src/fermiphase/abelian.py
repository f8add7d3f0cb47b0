"""Finitely generated abelian groups with optional symbolic torsion exponents.

Values are canonical: torsion is a tuple of prime powers sorted descending, so
two groups are equal iff they are isomorphic (symbolic entries compare by
their exact (prime, symbol, offset, bound) data, not by possible values).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple

from .errors import IllFormed


def _factor_prime_power(n: int) -> Tuple[Tuple[int, int], ...]:
    """Prime-power decomposition of n as ((p, p^a), ...)."""
    out = []
    d = 2
    m = n
    while d * d <= m:
        if m % d == 0:
            q = 1
            while m % d == 0:
                m //= d
                q *= d
            out.append((d, q))
        d += 1
    if m > 1:
        out.append((m, m))
    return tuple(out)


@dataclass(frozen=True)
class SymbolicTorsion:
    """A cyclic summand Z/p^(symbol+offset) with the constraint symbol >= min_value."""

    prime: int
    symbol: str
    offset: int = 0
    min_value: int = 1

    def __post_init__(self):
        if self.prime < 2:
            raise IllFormed("symbolic torsion needs a prime", prime=self.prime)
        if self.min_value + self.offset < 1:
            raise IllFormed(
                "symbolic exponent can reach zero",
                symbol=self.symbol,
                offset=self.offset,
                min_value=self.min_value,
            )

    def exponent_text(self) -> str:
        if self.offset == 0:
            return self.symbol
        sign = "+" if self.offset > 0 else "-"
        return f"{self.symbol}{sign}{abs(self.offset)}"

    def format(self) -> str:
        return f"Z/{self.prime}^{{{self.exponent_text()}}}"

    def value(self, assignment: int) -> int:
        if assignment < self.min_value:
            raise IllFormed(
                "assignment below the symbol's lower bound",
                symbol=self.symbol,
                assignment=assignment,
                min_value=self.min_value,
            )
        return self.prime ** (assignment + self.offset)


@dataclass(frozen=True)
class FinAbGroup:
    """Direct sum of Z^free_rank, concrete cyclic prime-power factors, and
    symbolic prime-power factors."""

    free_rank: int = 0
    torsion: Tuple[int, ...] = ()
    parametric: Tuple[SymbolicTorsion, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise IllFormed("negative free rank", free_rank=self.free_rank)
        flat = []
        for n in self.torsion:
            if n <= 1:
                raise IllFormed("torsion order must exceed 1", order=n)
            for _, q in _factor_prime_power(n):
                flat.append(q)
        flat.sort(key=lambda q: (q, _factor_prime_power(q)[0][0]), reverse=True)
        object.__setattr__(self, "torsion", tuple(flat))
        par = tuple(
            sorted(self.parametric, key=lambda s: (s.prime, s.symbol, s.offset, s.min_value))
        )
        object.__setattr__(self, "parametric", par)

    # constructors

    @classmethod
    def trivial(cls) -> "FinAbGroup":
        return cls()

    @classmethod
    def cyclic(cls, n: int) -> "FinAbGroup":
        if n < 1:
            raise IllFormed("cyclic group order must be positive", order=n)
        if n == 1:
            return cls()
        return cls(torsion=(n,))

    @classmethod
    def free(cls, r: int) -> "FinAbGroup":
        return cls(free_rank=r)

    # structure

    def __add__(self, other: "FinAbGroup") -> "FinAbGroup":
        if not isinstance(other, FinAbGroup):
            return NotImplemented
        return FinAbGroup(
            self.free_rank + other.free_rank,
            self.torsion + other.torsion,
            self.parametric + other.parametric,
        )

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion and not self.parametric

    def order(self) -> Optional[int]:
        """Group order, or None when infinite or symbolic."""
        if self.free_rank or self.parametric:
            return None
        out = 1
        for q in self.torsion:
            out *= q
        return out

    def torsion_part(self) -> "FinAbGroup":
        return FinAbGroup(0, self.torsion, self.parametric)

    def primary_part(self, p: int) -> "FinAbGroup":
        """The p-primary torsion (free part dropped)."""
        return FinAbGroup(
            0,
            tuple(q for q in self.torsion if q % p == 0),
            tuple(s for s in self.parametric if s.prime == p),
        )

    def two_primary(self) -> "FinAbGroup":
        return self.primary_part(2)

    def odd_part(self) -> "FinAbGroup":
        """The odd torsion (free part dropped)."""
        return FinAbGroup(
            0,
            tuple(q for q in self.torsion if q % 2),
            tuple(s for s in self.parametric if s.prime != 2),
        )

    def evaluate(self, **assignments: int) -> "FinAbGroup":
        """Resolve symbolic factors whose symbol appears in assignments."""
        torsion = list(self.torsion)
        left = []
        for s in self.parametric:
            if s.symbol in assignments:
                torsion.append(s.value(assignments[s.symbol]))
            else:
                left.append(s)
        return FinAbGroup(self.free_rank, tuple(torsion), tuple(left))

    # formatting

    def format(self) -> str:
        """Primary decomposition, e.g. 'Z^2 + Z/8 + Z/3 + Z/2'."""
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{q}" for q in self.torsion)
        parts.extend(s.format() for s in self.parametric)
        return " + ".join(parts) if parts else "0"

    def format_merged(self) -> str:
        """Invariant-factor form: prime powers greedily merged, e.g. 'Z/6 + Z/2'."""
        by_prime: Dict[int, list] = {}
        for q in self.torsion:
            p = _factor_prime_power(q)[0][0]
            by_prime.setdefault(p, []).append(q)
        slots = max((len(v) for v in by_prime.values()), default=0)
        factors = []
        for i in range(slots):
            f = 1
            for p in sorted(by_prime):
                if i < len(by_prime[p]):
                    f *= by_prime[p][i]
            factors.append(f)
        factors.sort(reverse=True)
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{f}" for f in factors)
        parts.extend(s.format() for s in self.parametric)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        out: dict = {"free_rank": self.free_rank, "torsion": list(self.torsion)}
        if self.parametric:
            out["parametric"] = [
                {
                    "prime": s.prime,
                    "symbol": s.symbol,
                    "offset": s.offset,
                    "min_value": s.min_value,
                }
                for s in self.parametric
            ]
        return out

    @classmethod
    def from_json(cls, doc: dict) -> "FinAbGroup":
        par = tuple(
            SymbolicTorsion(
                prime=e["prime"],
                symbol=e["symbol"],
                offset=e.get("offset", 0),
                min_value=e.get("min_value", 1),
            )
            for e in doc.get("parametric", ())
        )
        return cls(doc.get("free_rank", 0), tuple(doc.get("torsion", ())), par)

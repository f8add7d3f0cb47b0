"""The two finite graded algebras the engine works over.

"A(1)" is the subalgebra of the mod-2 Steenrod algebra generated by Sq1 and
Sq2. "E(1)" is the exterior algebra on the Milnor primitives Q0 (degree 1)
and Q1 (degree 3).

Both are presented by letters and rewriting rules on words; a word is a
string of one-character letters with the leftmost letter acting outermost.
Rewriting either kills a word or yields its unique normal form, and the rule
sets below are confluent and terminating, so the normal forms are a basis.

A(1), letters "1" = Sq1 and "2" = Sq2:
    11 -> (zero)        Sq1 Sq1 = 0
    22 -> 121           Sq2 Sq2 = Sq1 Sq2 Sq1
    2121 -> 1212        consequence of the above, needed for confluence
Dimension 8, top class "1212" in degree 6.

E(1), letters "0" = Q0 and "1" = Q1:
    00 -> (zero), 11 -> (zero), 10 -> 01
Dimension 4, basis degrees {0, 1, 3, 4}.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

ZERO = None  # rewriting result for words that vanish

_PRESENTATIONS = {
    "A(1)": {
        "letters": {"1": 1, "2": 2},
        "rules": [("11", ZERO), ("22", "121"), ("2121", "1212")],
        # defining relations only; the third rule follows by associativity
        "relations": [("11", ZERO), ("22", "121")],
        "top": "1212",
        "dim": 8,
    },
    "E(1)": {
        "letters": {"0": 1, "1": 3},
        "rules": [("00", ZERO), ("11", ZERO), ("10", "01")],
        "relations": [("00", ZERO), ("11", ZERO), ("10", "01")],
        "top": "01",
        "dim": 4,
    },
}


def _rewrite(word: str, rules: List[Tuple[str, Optional[str]]]) -> Optional[str]:
    """Normal form of a word, or None if it rewrites to zero."""
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            i = word.find(lhs)
            if i >= 0:
                if rhs is ZERO:
                    return None
                word = word[:i] + rhs + word[i + len(lhs):]
                changed = True
                break
    return word


class FiniteGradedAlgebra:
    """A finite-dimensional graded F2 algebra with a fixed word basis.

    basis: normal-form words sorted by (degree, word); the index in this
        list is the coordinate used by every matrix in the package.
    mul[(a, b)]: product of two basis words, again a basis word or None.
        Rewriting guarantees single-term products, which _self_check verifies.
    relations: the defining relations, as pairs (word, equal word or None),
        used by the module checker.
    """

    def __init__(self, name: str):
        if name not in _PRESENTATIONS:
            raise ValueError(f"unknown algebra {name!r}; expected 'A(1)' or 'E(1)'")
        pres = _PRESENTATIONS[name]
        self.name = name
        self.letters: Dict[str, int] = dict(pres["letters"])
        self.rules: List[Tuple[str, Optional[str]]] = list(pres["rules"])
        self.relations: List[Tuple[str, Optional[str]]] = list(pres["relations"])

        # enumerate normal forms by breadth-first word extension
        seen = {""}
        frontier = [""]
        while frontier:
            nxt = []
            for w in frontier:
                for letter in self.letters:
                    nf = _rewrite(w + letter, self.rules)
                    if nf is not None and nf not in seen:
                        seen.add(nf)
                        nxt.append(nf)
            frontier = nxt
            if len(seen) > 64:
                raise RuntimeError("rewriting system did not close up")

        def deg(word: str) -> int:
            return sum(self.letters[c] for c in word)

        self.basis: List[str] = sorted(seen, key=lambda w: (deg(w), w))
        self.degree: Dict[str, int] = {w: deg(w) for w in self.basis}
        self.index: Dict[str, int] = {w: i for i, w in enumerate(self.basis)}
        self.dim = len(self.basis)
        self.top_degree = max(self.degree.values())
        self.top_word: str = pres["top"]
        self.generators: List[str] = sorted(self.letters, key=lambda c: self.letters[c])
        self.basis_by_degree: Dict[int, List[str]] = {}
        for w in self.basis:
            self.basis_by_degree.setdefault(self.degree[w], []).append(w)

        self.mul: Dict[Tuple[str, str], Optional[str]] = {}
        for a in self.basis:
            for b in self.basis:
                self.mul[(a, b)] = _rewrite(a + b, self.rules)

        self._self_check(pres["dim"])

    def multiply(self, a: str, b: str) -> Optional[str]:
        return self.mul[(a, b)]

    def gen_degree(self, letter: str) -> int:
        return self.letters[letter]

    def _self_check(self, expected_dim: int) -> None:
        if self.top_word not in self.index:
            raise RuntimeError("declared top class is not a basis word")
        if self.degree[self.top_word] != self.top_degree:
            raise RuntimeError("top class is not in the top degree")
        if self.basis[0] != "":
            raise RuntimeError("unit missing from basis")
        if self.dim != expected_dim:
            raise RuntimeError(f"{self.name} basis has {self.dim} words, expected {expected_dim}")
        for a in self.basis:
            if self.mul[("", a)] != a or self.mul[(a, "")] != a:
                raise RuntimeError("unit law fails")
        # associativity on all basis triples; products re-enter the basis,
        # so this checks the full multiplication table
        for a in self.basis:
            for b in self.basis:
                ab = self.mul[(a, b)]
                for c in self.basis:
                    bc = self.mul[(b, c)]
                    left = None if ab is None else self.mul[(ab, c)]
                    right = None if bc is None else self.mul[(a, bc)]
                    if left != right:
                        raise RuntimeError(f"associativity fails on ({a!r},{b!r},{c!r})")
        for v in self.mul.values():
            if v is not None and v not in self.index:
                raise RuntimeError("product left the basis")


_CACHE: Dict[str, FiniteGradedAlgebra] = {}


def make_algebra(name: str) -> FiniteGradedAlgebra:
    """Return the shared instance of the algebra called name ("A(1)" or "E(1)")."""
    if name not in _CACHE:
        _CACHE[name] = FiniteGradedAlgebra(name)
    return _CACHE[name]

"""Finitely generated graded modules over A(1) or E(1), on bounded windows.

An FGModule stores, per degree, a dimension and ordered basis labels, plus
one matrix per algebra generator per degree. Degrees above `truncation` are
unknown territory: any access whose answer would depend on them raises
TruncationExceeded instead of returning a silent zero. Modules with
truncation None are exact (zero outside the stored window).

Vectors are ints (bit i = basis element i of that degree); generator action
matrices send degree t to degree t + |g|.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..errors import AlgebraMismatch, IllFormed, TruncationExceeded
from .algebra import FiniteGradedAlgebra, make_algebra
from .bitmat import EchelonSpace, F2Matrix

Vec = int
DegVec = Tuple[int, Vec]


class GradedF2Space:
    """Degreewise dimensions and basis labels on a window [lo, hi]."""

    def __init__(
        self,
        dims: Dict[int, int],
        labels: Optional[Dict[int, List[str]]] = None,
        window: Optional[Tuple[int, int]] = None,
    ):
        self.dims: Dict[int, int] = {t: d for t, d in dims.items() if d > 0}
        if labels is None:
            labels = {t: [f"e{t}_{i}" for i in range(d)] for t, d in self.dims.items()}
        self.labels: Dict[int, List[str]] = {t: list(labels.get(t, [])) for t in self.dims}
        if window is None:
            if self.dims:
                window = (min(self.dims), max(self.dims))
            else:
                window = (0, -1)
        self.window: Tuple[int, int] = (window[0], window[1])
        for t, d in self.dims.items():
            if not (self.window[0] <= t <= self.window[1]):
                raise IllFormed(f"degree {t} outside window {self.window}")
            if len(self.labels[t]) != d:
                raise IllFormed(f"degree {t}: {len(self.labels[t])} labels for dim {d}")
            if len(set(self.labels[t])) != d:
                raise IllFormed(f"degree {t}: duplicate basis labels")

    def dim(self, t: int) -> int:
        return self.dims.get(t, 0)

    def degrees(self) -> List[int]:
        return sorted(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())


class FGModule:
    """A graded module over one of the two finite algebras.

    action[g][t] is the matrix of generator g from degree t to t + |g|;
    entries are stored only where both source and target can be nonzero,
    absence meaning the zero map. truncation is the last degree at which
    the stored data is asserted correct (None: exact everywhere).
    """

    def __init__(
        self,
        algebra: FiniteGradedAlgebra,
        space: GradedF2Space,
        action: Dict[str, Dict[int, F2Matrix]],
        truncation: Optional[int] = None,
        name: str = "",
    ):
        self.algebra = algebra
        self.space = space
        self.truncation = truncation
        self.name = name
        self.action: Dict[str, Dict[int, F2Matrix]] = {}
        for g in algebra.generators:
            self.action[g] = {}
            dg = algebra.gen_degree(g)
            for t, mat in sorted(action.get(g, {}).items()):
                if mat.is_zero():
                    continue
                if mat.cols != space.dim(t) or mat.rows != space.dim(t + dg):
                    raise IllFormed(
                        f"action of {g!r} at degree {t}: shape {mat.rows}x{mat.cols}, "
                        f"expected {space.dim(t + dg)}x{space.dim(t)}"
                    )
                if truncation is not None and t + dg > truncation:
                    raise IllFormed(
                        f"action of {g!r} at degree {t} lands above truncation {truncation}"
                    )
                self.action[g][t] = mat
        unknown = set(action) - set(self.action)
        if unknown:
            raise IllFormed(f"action given for non-generators {sorted(unknown)}")
        if truncation is not None and space.dims and max(space.dims) > truncation:
            raise IllFormed("basis stored above truncation")

    # basic queries

    def dim(self, t: int) -> int:
        self._guard(t)
        return self.space.dim(t)

    def degrees(self) -> List[int]:
        return self.space.degrees()

    @property
    def total_dim(self) -> int:
        return self.space.total_dim

    @property
    def window(self) -> Tuple[int, int]:
        return self.space.window

    def min_degree(self) -> int:
        return self.space.window[0]

    def labels(self, t: int) -> List[str]:
        return self.space.labels.get(t, [])

    def label(self, t: int, i: int) -> str:
        return self.space.labels[t][i]

    def _guard(self, t: int) -> None:
        if self.truncation is not None and t > self.truncation:
            raise TruncationExceeded(
                f"degree {t} above truncation {self.truncation}",
                degree=t,
                truncation=self.truncation,
            )

    # action

    def act_gen(self, g: str, t: int) -> F2Matrix:
        dg = self.algebra.gen_degree(g)
        self._guard(t + dg)
        mat = self.action[g].get(t)
        if mat is None:
            return F2Matrix(self.space.dim(t + dg), self.space.dim(t))
        return mat

    def act_word(self, word: str, t: int) -> F2Matrix:
        """Matrix of a word of letters at degree t; leftmost letter outermost."""
        self._guard(t + sum(self.algebra.gen_degree(c) for c in word))
        mat = F2Matrix.identity(self.space.dim(t))
        cur = t
        for letter in reversed(word):
            mat = self.act_gen(letter, cur).mul(mat)
            cur += self.algebra.gen_degree(letter)
        return mat

    def act(self, word: str, t: int, vec: Vec) -> Vec:
        return self.act_word(word, t).apply(vec)


class ModuleHom:
    """A degree-d graded map f: source → target, one matrix per degree."""

    def __init__(
        self,
        source: FGModule,
        target: FGModule,
        degree: int,
        mats: Dict[int, F2Matrix],
    ):
        if source.algebra is not target.algebra:
            raise AlgebraMismatch("hom between modules over different algebras")
        self.source = source
        self.target = target
        self.degree = degree
        self.mats: Dict[int, F2Matrix] = {}
        for t, mat in sorted(mats.items()):
            if mat.cols != source.space.dim(t) or mat.rows != target.space.dim(t + degree):
                raise IllFormed(f"hom matrix at degree {t} has wrong shape")
            if not mat.is_zero():
                self.mats[t] = mat

    def mat(self, t: int) -> F2Matrix:
        m = self.mats.get(t)
        if m is None:
            return F2Matrix(self.target.space.dim(t + self.degree), self.source.space.dim(t))
        return m

    def apply(self, t: int, vec: Vec) -> Vec:
        return self.mat(t).apply(vec)

    def is_module_map(self) -> bool:
        """Check commuting with every generator action wherever both sides are known."""
        alg = self.source.algebra
        caps = [
            m.truncation for m in (self.source, self.target) if m.truncation is not None
        ]
        cap = min(caps) if caps else None
        for g in alg.generators:
            dg = alg.gen_degree(g)
            for t in set(self.source.degrees()) | set(self.mats):
                if cap is not None and t + dg + abs(self.degree) > cap:
                    continue
                left = self.target.act_gen(g, t + self.degree).mul(self.mat(t))
                right = self.mat(t + dg).mul(self.source.act_gen(g, t))
                if left != right:
                    return False
        return True


def hom_compose(outer: ModuleHom, inner: ModuleHom) -> ModuleHom:
    """outer ∘ inner (apply inner first)."""
    if inner.target is not outer.source:
        raise IllFormed("hom_compose: inner.target must be outer.source")
    mats = {}
    for t in inner.source.degrees():
        m = outer.mat(t + inner.degree).mul(inner.mat(t))
        if not m.is_zero():
            mats[t] = m
    return ModuleHom(inner.source, outer.target, inner.degree + outer.degree, mats)


def verify_module(m: FGModule) -> List[Dict[str, object]]:
    """Check the algebra's defining relations on every basis element.

    A relation lhs = rhs (rhs None meaning zero) of degree k is checked at
    degree t whenever t + k is within truncation. Each failing basis element
    produces one report entry {relation, degree, basis}.
    """
    violations: List[Dict[str, object]] = []
    alg = m.algebra
    for lhs, rhs in alg.relations:
        k = sum(alg.gen_degree(c) for c in lhs)
        pretty = f"{_word_name(alg, lhs)} = {_word_name(alg, rhs) if rhs else '0'}"
        for t in m.degrees():
            if m.truncation is not None and t + k > m.truncation:
                continue
            left = m.act_word(lhs, t)
            right = m.act_word(rhs, t) if rhs else F2Matrix(left.rows, left.cols)
            diff = left.add(right)
            if diff.is_zero():
                continue
            for j in range(diff.cols):
                if diff.column(j):
                    violations.append(
                        {"relation": pretty, "degree": t, "basis": m.label(t, j)}
                    )
    return violations


def _word_name(alg: FiniteGradedAlgebra, word: str) -> str:
    if word == "":
        return "1"
    if alg.name == "A(1)":
        return "".join(f"Sq{c}" for c in word)
    return "".join(f"Q{c}" for c in word)


def restrict_to_e1(m: FGModule) -> FGModule:
    """View a module over A(1) as one over E(1).

    Q0 acts as Sq1; Q1 acts as Sq1∘Sq2 + Sq2∘Sq1 (the degree-3 primitive).
    """
    if m.algebra.name != "A(1)":
        raise AlgebraMismatch(f"restrict_to_e1 expects an A(1)-module, got {m.algebra.name}")
    ex = make_algebra("E(1)")
    q0: Dict[int, F2Matrix] = {}
    q1: Dict[int, F2Matrix] = {}
    for t in m.degrees():
        if m.truncation is None or t + 1 <= m.truncation:
            mat = m.act_gen("1", t)
            if not mat.is_zero():
                q0[t] = mat
        if m.truncation is None or t + 3 <= m.truncation:
            mat = m.act_word("12", t).add(m.act_word("21", t))
            if not mat.is_zero():
                q1[t] = mat
    return FGModule(
        ex,
        GradedF2Space(dict(m.space.dims), dict(m.space.labels), m.space.window),
        {"0": q0, "1": q1},
        truncation=m.truncation,
        name=m.name,
    )


def suspension(m: FGModule, k: int) -> FGModule:
    """Shift all degrees up by k."""
    dims = {t + k: d for t, d in m.space.dims.items()}
    labels = {t + k: list(ls) for t, ls in m.space.labels.items()}
    lo, hi = m.space.window
    action = {
        g: {t + k: mat for t, mat in mats.items()} for g, mats in m.action.items()
    }
    trunc = None if m.truncation is None else m.truncation + k
    name = m.name and (f"S{k}[{m.name}]" if k else m.name)
    out = FGModule(
        m.algebra,
        GradedF2Space(dims, labels, (lo + k, hi + k)),
        action,
        truncation=trunc,
        name=name,
    )
    if hasattr(m, "free_gens"):
        out.free_gens = [(d + k, n) for d, n in m.free_gens]  # type: ignore[attr-defined]
        out.free_order = {t + k: row for t, row in m.free_order.items()}  # type: ignore[attr-defined]
    return out


def direct_sum(*mods: FGModule) -> FGModule:
    """Block direct sum; colliding labels get a #<summand index> suffix."""
    if not mods:
        raise IllFormed("direct_sum of nothing")
    alg = mods[0].algebra
    for m in mods:
        if m.algebra is not alg:
            raise AlgebraMismatch("direct_sum over mixed algebras")
    caps = [m.truncation for m in mods if m.truncation is not None]
    trunc = min(caps) if caps else None

    def keep(t: int) -> bool:
        return trunc is None or t <= trunc

    degrees = sorted({t for m in mods for t in m.degrees() if keep(t)})
    dims: Dict[int, int] = {}
    labels: Dict[int, List[str]] = {}
    for t in degrees:
        row: List[str] = []
        flat = [(i, lbl) for i, m in enumerate(mods) for lbl in m.labels(t)]
        counts: Dict[str, int] = {}
        for _, lbl in flat:
            counts[lbl] = counts.get(lbl, 0) + 1
        for i, lbl in flat:
            row.append(lbl if counts[lbl] == 1 else f"{lbl}#{i}")
        dims[t] = len(row)
        labels[t] = row
    action: Dict[str, Dict[int, F2Matrix]] = {g: {} for g in alg.generators}
    for g in alg.generators:
        dg = alg.gen_degree(g)
        for t in degrees:
            if not keep(t + dg):
                continue
            blocks = []
            for m in mods:
                src, tgt = m.space.dim(t), m.space.dim(t + dg)
                blk = m.action[g].get(t)
                blocks.append(blk if blk is not None else F2Matrix(tgt, src))
            rows_total = sum(b.rows for b in blocks)
            cols_total = sum(b.cols for b in blocks)
            if rows_total == 0 or cols_total == 0:
                continue
            data = [0] * rows_total
            roff = coff = 0
            for b in blocks:
                for i, row in enumerate(b.data):
                    data[roff + i] = row << coff
                roff += b.rows
                coff += b.cols
            action[g][t] = F2Matrix(rows_total, cols_total, data)
    lo = min((m.space.window[0] for m in mods if m.space.dims), default=0)
    hi = max((min(m.space.window[1], trunc) if trunc is not None else m.space.window[1]
              for m in mods if m.space.dims), default=-1)
    return FGModule(alg, GradedF2Space(dims, labels, (lo, hi)), action, truncation=trunc)


def free_module(
    algebra: FiniteGradedAlgebra,
    gens: Sequence[Tuple[int, str]],
    truncation: Optional[int] = None,
) -> FGModule:
    """Free module on generators [(degree, name)], basis word·generator.

    Basis at degree t: generators in given order, each contributing the
    algebra basis words of the complementary degree in algebra order. Labels
    are "name" for the generator itself and "word*name" for word ≠ 1. Free
    modules over a finite algebra are finite, so truncation is optional;
    passing one crops the module.

    The result carries two extra attributes used by hom_from_free and the
    resolution code: free_gens (the generator list) and free_order, mapping
    each degree to its ordered list of (word, generator index) pairs.
    """
    index: Dict[Tuple[str, int], Tuple[int, int]] = {}
    dims: Dict[int, int] = {}
    labels: Dict[int, List[str]] = {}
    order: Dict[int, List[Tuple[str, int]]] = {}
    top = max((d for d, _ in gens), default=0) + algebra.top_degree
    hi = top if truncation is None else min(top, truncation)
    lo = min((d for d, _ in gens), default=0)
    for t in range(lo, hi + 1):
        row: List[Tuple[str, int]] = []
        lab: List[str] = []
        for gi, (d, gname) in enumerate(gens):
            for w in algebra.basis_by_degree.get(t - d, []):
                row.append((w, gi))
                lab.append(gname if w == "" else f"{w}*{gname}")
        if row:
            for i, key in enumerate(row):
                index[key] = (t, i)
            dims[t] = len(row)
            labels[t] = lab
            order[t] = row
    action: Dict[str, Dict[int, F2Matrix]] = {g: {} for g in algebra.generators}
    for g in algebra.generators:
        dg = algebra.gen_degree(g)
        for t, row in order.items():
            if t + dg > hi or (t + dg) not in dims:
                continue
            mat = F2Matrix(dims[t + dg], dims[t])
            for j, (w, gi) in enumerate(row):
                prod = algebra.mul[(g, w)]
                if prod is None:
                    continue
                ti, i = index[(prod, gi)]
                mat.data[i] |= 1 << j
            if not mat.is_zero():
                action[g][t] = mat
    out = FGModule(
        algebra,
        GradedF2Space(dims, labels, (lo, hi) if dims else (0, -1)),
        action,
        truncation=truncation,
    )
    out.free_gens = list(gens)  # type: ignore[attr-defined]
    out.free_order = order  # type: ignore[attr-defined]
    return out


def hom_from_free(free: FGModule, target: FGModule, images: Sequence[DegVec]) -> ModuleHom:
    """The module map out of a free module sending generator i to images[i].

    images[i] = (degree, vector in target); all generators must shift degree
    by the same amount, which becomes the hom's degree. Requires a module
    built by free_module (uses its free_gens/free_order attributes).
    """
    gens: List[Tuple[int, str]] = getattr(free, "free_gens")
    order: Dict[int, List[Tuple[str, int]]] = getattr(free, "free_order")
    if len(images) != len(gens):
        raise IllFormed(f"{len(images)} images for {len(gens)} generators")
    if gens:
        shifts = {images[i][0] - gens[i][0] for i in range(len(gens))}
        if len(shifts) != 1:
            raise IllFormed("generator images do not share one degree shift")
        d = shifts.pop()
    else:
        d = 0
    mats: Dict[int, F2Matrix] = {}
    for t, row in order.items():
        mat = F2Matrix(target.space.dim(t + d), free.space.dim(t))
        for j, (w, gi) in enumerate(row):
            ti, vi = images[gi]
            img = target.act(w, ti, vi)
            for i in range(mat.rows):
                if (img >> i) & 1:
                    mat.data[i] |= 1 << j
        if not mat.is_zero():
            mats[t] = mat
    return ModuleHom(free, target, d, mats)


def span_closure(m: FGModule, seeds: Iterable[DegVec]) -> Dict[int, EchelonSpace]:
    """Smallest action-closed graded subspace containing the seed vectors.

    Closure is taken under all generator actions that stay within truncation;
    the result is one echelon space per degree.
    """
    spaces: Dict[int, EchelonSpace] = {}
    frontier: List[DegVec] = []
    for t, v in seeds:
        if v == 0:
            continue
        sp = spaces.setdefault(t, EchelonSpace())
        if sp.add(v):
            frontier.append((t, v))
    alg = m.algebra
    while frontier:
        t, v = frontier.pop()
        for g in alg.generators:
            dg = alg.gen_degree(g)
            if m.truncation is not None and t + dg > m.truncation:
                continue
            w = m.act_gen(g, t).apply(v)
            if w == 0:
                continue
            sp = spaces.setdefault(t + dg, EchelonSpace())
            if sp.add(w):
                frontier.append((t + dg, w))
    return {t: sp for t, sp in spaces.items() if sp.dim}


def submodule(
    m: FGModule, seeds: Iterable[DegVec], prefix: str = "s"
) -> Tuple[FGModule, ModuleHom]:
    """The submodule generated by seeds, with its inclusion map."""
    spaces = span_closure(m, seeds)
    dims = {t: sp.dim for t, sp in spaces.items()}
    labels = {t: [f"{prefix}{t}_{i}" for i in range(d)] for t, d in dims.items()}
    action: Dict[str, Dict[int, F2Matrix]] = {g: {} for g in m.algebra.generators}
    for g in m.algebra.generators:
        dg = m.algebra.gen_degree(g)
        for t, sp in spaces.items():
            tgt = spaces.get(t + dg)
            if tgt is None:
                continue
            if m.truncation is not None and t + dg > m.truncation:
                continue
            mat = F2Matrix(tgt.dim, sp.dim)
            for j, b in enumerate(sp.basis):
                w = m.act_gen(g, t).apply(b)
                c = tgt.coords(w)
                if c is None:
                    raise IllFormed("span_closure produced a non-closed space")
                for i in range(tgt.dim):
                    if (c >> i) & 1:
                        mat.data[i] |= 1 << j
            if not mat.is_zero():
                action[g][t] = mat
    sub = FGModule(
        m.algebra,
        GradedF2Space(dims, labels, (min(dims), max(dims)) if dims else (0, -1)),
        action,
        truncation=m.truncation,
    )
    inc_mats = {}
    for t, sp in spaces.items():
        mat = F2Matrix(m.space.dim(t), sp.dim)
        for j, b in enumerate(sp.basis):
            for i in range(m.space.dim(t)):
                if (b >> i) & 1:
                    mat.data[i] |= 1 << j
        inc_mats[t] = mat
    return sub, ModuleHom(sub, m, 0, inc_mats)


def quotient(m: FGModule, seeds: Iterable[DegVec]) -> Tuple[FGModule, ModuleHom]:
    """Quotient of m by the submodule generated by seeds, with projection.

    Coset representatives are the parent basis elements whose coordinate is
    not an echelon pivot of the subspace, so quotient labels are inherited.
    """
    spaces = span_closure(m, seeds)
    kept: Dict[int, List[int]] = {}
    dims: Dict[int, int] = {}
    labels: Dict[int, List[str]] = {}
    for t in m.degrees():
        piv = set(spaces[t].pivots()) if t in spaces else set()
        cols = [j for j in range(m.space.dim(t)) if j not in piv]
        if cols:
            kept[t] = cols
            dims[t] = len(cols)
            labels[t] = [m.label(t, j) for j in cols]
    proj: Dict[int, F2Matrix] = {}
    for t in m.degrees():
        cols = kept.get(t, [])
        mat = F2Matrix(len(cols), m.space.dim(t))
        sp = spaces.get(t)
        for j in range(m.space.dim(t)):
            v = sp.reduce(1 << j) if sp is not None else (1 << j)
            for i, c in enumerate(cols):
                if (v >> c) & 1:
                    mat.data[i] |= 1 << j
        proj[t] = mat
    action: Dict[str, Dict[int, F2Matrix]] = {g: {} for g in m.algebra.generators}
    for g in m.algebra.generators:
        dg = m.algebra.gen_degree(g)
        for t, cols in kept.items():
            if (t + dg) not in kept:
                continue
            if m.truncation is not None and t + dg > m.truncation:
                continue
            sect = F2Matrix(m.space.dim(t), len(cols))
            for j, c in enumerate(cols):
                sect.data[c] |= 1 << j
            mat = proj[t + dg].mul(m.act_gen(g, t)).mul(sect)
            if not mat.is_zero():
                action[g][t] = mat
    quo = FGModule(
        m.algebra,
        GradedF2Space(dims, labels, (min(dims), max(dims)) if dims else (0, -1)),
        action,
        truncation=m.truncation,
    )
    proj_hom = ModuleHom(m, quo, 0, {t: proj[t] for t in m.degrees() if t in kept})
    return quo, proj_hom


# serialization

def module_to_json(m: FGModule) -> Dict[str, object]:
    action = {}
    for g in m.algebra.generators:
        entries = []
        for t in sorted(m.action[g]):
            entries.append([t, list(m.action[g][t].data)])
        action[g] = entries
    return {
        "algebra": m.algebra.name,
        "window": list(m.space.window),
        "truncation": m.truncation,
        "dims": {str(t): m.space.dims[t] for t in sorted(m.space.dims)},
        "labels": {str(t): m.space.labels[t] for t in sorted(m.space.labels)},
        "action": action,
        "name": m.name,
    }


def module_from_json(doc: Dict[str, object]) -> FGModule:
    alg = make_algebra(str(doc["algebra"]))
    dims = {int(t): int(d) for t, d in dict(doc["dims"]).items()}
    labels = {int(t): [str(x) for x in ls] for t, ls in dict(doc["labels"]).items()}
    window = tuple(doc["window"])  # type: ignore[arg-type]
    space = GradedF2Space(dims, labels, (int(window[0]), int(window[1])))
    action: Dict[str, Dict[int, F2Matrix]] = {}
    for g, entries in dict(doc["action"]).items():
        per: Dict[int, F2Matrix] = {}
        dg = alg.gen_degree(str(g))
        for t, rows in entries:
            per[int(t)] = F2Matrix(space.dim(int(t) + dg), space.dim(int(t)), [int(r) for r in rows])
        action[str(g)] = per
    trunc = doc.get("truncation")
    return FGModule(
        alg,
        space,
        action,
        truncation=None if trunc is None else int(trunc),
        name=str(doc.get("name", "")),
    )


def canonical_json(doc: Dict[str, object]) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))

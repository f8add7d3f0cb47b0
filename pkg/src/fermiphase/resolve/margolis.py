"""Free-summand detection and splitting.

A basis vector on which the socle word of the algebra acts nonzero generates
a free cyclic submodule. Self-injectivity of the algebra guarantees a
retraction onto it, found here as one F2 linear system whose unknowns are the
retraction's matrix entries. Splitting repeats until no witness remains; a
witness is only accepted when the whole span of its free orbit lies inside
the known degree window, so truncated modules keep uncertifiable summands.
"""

from typing import Dict, List, Optional, Tuple

from ..errors import IllFormed
from ..f2homalg import (
    F2Matrix,
    FGModule,
    ModuleHom,
    free_module,
    hom_from_free,
    submodule,
)

__all__ = ["margolis_split", "split_once"]


def _find_witness(m: FGModule) -> Optional[Tuple[int, int]]:
    word = m.algebra.top_word
    top = m.algebra.top_degree
    for t in m.degrees():
        if m.truncation is not None and t + top > m.truncation:
            return None
        mat = m.act_word(word, t)
        for j in range(mat.cols):
            if mat.column(j):
                return t, j
    return None


def _retraction(m: FGModule, t0: int, j: int) -> ModuleHom:
    alg = m.algebra
    top = alg.top_degree
    target = free_module(alg, [(t0, "w")])

    offsets: Dict[int, int] = {}
    nvar = 0
    for d in range(t0, t0 + top + 1):
        offsets[d] = nvar
        nvar += target.dim(d) * m.dim(d)

    def var(d: int, r: int, c: int) -> int:
        return offsets[d] + r * m.dim(d) + c

    rows: List[int] = []
    rhs: List[int] = []

    rows.append(1 << var(t0, 0, j))
    rhs.append(1)

    for g in alg.generators:
        dg = alg.gen_degree(g)
        for d in range(t0 - dg, t0 + top - dg + 1):
            upper = d + dg
            fmat = target.act_gen(g, d)
            mmat = m.act_gen(g, d)
            for rp in range(target.dim(upper)):
                for c in range(m.dim(d)):
                    eq = 0
                    if d >= t0:
                        for k in range(target.dim(d)):
                            if fmat.entry(rp, k):
                                eq ^= 1 << var(d, k, c)
                    for k in range(m.dim(upper)):
                        if mmat.entry(k, c):
                            eq ^= 1 << var(upper, rp, k)
                    if eq:
                        rows.append(eq)
                        rhs.append(0)

    system = F2Matrix(len(rows), nvar, rows)
    want = 0
    for i, bit in enumerate(rhs):
        want |= bit << i
    sol = system.solve(want)
    if sol is None:
        raise IllFormed("free summand admits no retraction; algebra data broken")

    mats: Dict[int, F2Matrix] = {}
    for d in range(t0, t0 + top + 1):
        out = F2Matrix(target.dim(d), m.dim(d))
        for r in range(out.rows):
            for c in range(out.cols):
                if (sol >> var(d, r, c)) & 1:
                    out.data[r] |= 1 << c
        mats[d] = out
    return ModuleHom(m, target, 0, mats)


def split_once(m: FGModule):
    """Split off one free summand if a certified witness exists.

    Returns (degree, inclusion, retraction, complement, complement inclusion)
    or None. The inclusion and retraction compose to the identity of the
    free summand.
    """
    found = _find_witness(m)
    if found is None:
        return None
    t0, j = found
    ret = _retraction(m, t0, j)
    inc = hom_from_free(ret.target, m, [(t0, 1 << j)])

    seeds = []
    for d in m.degrees():
        mat = ret.mat(d)
        if mat.rows == 0:
            for c in range(m.dim(d)):
                seeds.append((d, 1 << c))
        else:
            for v in mat.kernel_basis():
                seeds.append((d, v))
    complement, iota = submodule(m, seeds, prefix="m")
    return t0, inc, ret, complement, iota


def margolis_split(m: FGModule) -> Tuple[List[int], FGModule]:
    """All certified free summand degrees, plus the reduced complement."""
    degrees: List[int] = []
    current = m
    while True:
        step = split_once(current)
        if step is None:
            return sorted(degrees), current
        t0, _, _, current, _ = step
        degrees.append(t0)

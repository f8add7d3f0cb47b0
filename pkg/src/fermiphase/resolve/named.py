"""The catalog of named modules and summand matching against it.

Catalog entries are built from explicit cell diagrams or from quotients and
syzygies of free modules, and every constructor runs the relation checker
before returning. Entries with an infinite tail demand an explicit
truncation degree.

match_named peels direct summands off a module: free summands first via the
socle witness, then catalog entries by a fingerprint filter (graded
dimensions, then homology of the two primitive operators), then an explicit
split realized by an inclusion and retraction pair. Whatever survives is
returned as the remainder, never an error.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..errors import IllFormed
from ..f2homalg import (
    F2Matrix,
    FGModule,
    GradedF2Space,
    ModuleHom,
    free_module,
    hom_compose,
    make_algebra,
    restrict_to_e1,
    submodule,
    quotient,
    suspension,
    verify_module,
)
from .margolis import split_once
from .resolution import minimal_resolution

__all__ = [
    "MatchResult",
    "binom2",
    "catalog_names",
    "match_named",
    "named_module",
    "stunted_projective_module",
]

_INFINITE = ("H", "N5", "R0", "R1", "R3", "R5")

_ALL = (
    "A1",
    "E1",
    "F2",
    "H",
    "J",
    "N1",
    "N2",
    "N3",
    "N4",
    "N5",
    "Qbar",
    "R0",
    "R1",
    "R2",
    "R3",
    "R5",
)


def catalog_names() -> List[str]:
    return list(_ALL)


def binom2(n: int, j: int) -> int:
    """Binomial coefficient mod 2, negative upper argument allowed."""
    if j < 0:
        return 0
    if n < 0:
        n = -n + j - 1
    if n < j:
        return 0
    return 1 if (n & j) == j else 0


def _cell_module(alg, cells, edges, truncation, name):
    if truncation is not None:
        cells = [(d, lab) for d, lab in cells if d <= truncation]
    index: Dict[str, Tuple[int, int]] = {}
    dims: Dict[int, int] = {}
    labels: Dict[int, List[str]] = {}
    for d, lab in cells:
        index[lab] = (d, dims.get(d, 0))
        dims[d] = dims.get(d, 0) + 1
        labels.setdefault(d, []).append(lab)
    mats: Dict[Tuple[str, int], F2Matrix] = {}
    for g, src, dst in edges:
        if src not in index or dst not in index:
            continue
        ds, js = index[src]
        dd, jd = index[dst]
        if dd != ds + alg.gen_degree(g):
            raise IllFormed(f"edge {src}->{dst} has the wrong degree for {g}")
        mat = mats.get((g, ds))
        if mat is None:
            mat = F2Matrix(dims[dd], dims[ds])
            mats[g, ds] = mat
        mat.data[jd] |= 1 << js
    action: Dict[str, Dict[int, F2Matrix]] = {}
    for (g, ds), mat in mats.items():
        action.setdefault(g, {})[ds] = mat
    m = FGModule(
        alg, GradedF2Space(dims, labels), action, truncation=truncation, name=name
    )
    bad = verify_module(m)
    if bad:
        raise IllFormed(f"cell diagram for {name} breaks relations: {bad[:3]}")
    return m


def stunted_projective_module(coefficient: int, truncation: int) -> FGModule:
    """Infinite cyclic cell tower x_k with Sq^j x_k = binom(k+coefficient, j)."""
    if truncation is None:
        raise IllFormed("a stunted tower needs a truncation degree")
    a1 = make_algebra("A(1)")
    cells = [(k, f"x{k}") for k in range(truncation + 1)]
    edges = []
    for k in range(truncation + 1):
        for j in (1, 2):
            if binom2(coefficient + k, j):
                edges.append((str(j), f"x{k}", f"x{k + j}"))
    return _cell_module(a1, cells, edges, truncation, f"stunted({coefficient})")


def _word_seed(free, degree, word):
    return degree, 1 << free.free_order[degree].index((word, 0))


def _ground(alg_name):
    alg = make_algebra(alg_name)
    return FGModule(alg, GradedF2Space({0: 1}, {0: ["u"]}), {}, name="F2")


def _build_r2():
    a1 = make_algebra("A(1)")
    free = free_module(a1, [(0, "u")])
    ideal, _ = submodule(free, [_word_seed(free, 1, "1"), _word_seed(free, 2, "2")])
    return suspension(ideal, -1)


def _build_quotient(words):
    a1 = make_algebra("A(1)")
    free = free_module(a1, [(0, "u")])
    seeds = [_word_seed(free, a1.degree[w], w) for w in words]
    out, _ = quotient(free, seeds)
    return out


def _build_n2():
    res = minimal_resolution(_build_n1(), 1, 10)
    stage = res.frees[1]
    bnd = res.maps[1]
    seeds = []
    for t in stage.degrees():
        for v in bnd.mat(t).kernel_basis():
            seeds.append((t, v))
    syzygy, _ = submodule(res.frees[1], seeds, prefix="n")
    return suspension(syzygy, -4)


def _build_n1():
    a1 = make_algebra("A(1)")
    return _cell_module(
        a1, [(0, "x0"), (1, "x1")], [("1", "x0", "x1")], None, "N1"
    )


def _build_n4():
    a1 = make_algebra("A(1)")
    cells = [
        (0, "u0"),
        (1, "j1"),
        (2, "j2"),
        (2, "q2"),
        (3, "q3"),
        (3, "j3"),
        (4, "j4"),
        (5, "j5"),
    ]
    edges = [
        ("1", "j1", "j2"),
        ("1", "q2", "q3"),
        ("1", "j4", "j5"),
        ("2", "u0", "q2"),
        ("2", "j1", "j3"),
        ("2", "j2", "j4"),
        ("2", "j3", "j5"),
        ("2", "q3", "j5"),
    ]
    return _cell_module(a1, cells, edges, None, "N4")


def _r3_cells_edges(truncation):
    cells = [(0, "a0"), (1, "a1")]
    cells += [(m + 2, f"x{m}") for m in range(max(truncation - 1, 0))]
    cells += [(3, "c3"), (4, "c4")]
    edges = [
        ("1", "a0", "a1"),
        ("1", "c3", "c4"),
        ("2", "a0", "x0"),
        ("2", "a1", "c3"),
        ("2", "x0", "c4"),
    ]
    for m in range(truncation):
        if m % 2 == 0:
            edges.append(("1", f"x{m}", f"x{m + 1}"))
        if m % 4 in (1, 2):
            edges.append(("2", f"x{m}", f"x{m + 2}"))
    return cells, edges


def _build_r3(truncation):
    a1 = make_algebra("A(1)")
    cells, edges = _r3_cells_edges(truncation)
    return _cell_module(a1, cells, edges, truncation, "R3")


def _build_r5(truncation):
    a1 = make_algebra("A(1)")
    cells = [(0, "a0"), (1, "a1"), (3, "a3"), (4, "a4")]
    cells += [(k + 1, f"y{k}") for k in range(truncation)]
    edges = [
        ("1", "a0", "a1"),
        ("1", "a3", "a4"),
        ("2", "a0", "y1"),
        ("2", "a1", "a3"),
        ("2", "y1", "a4"),
    ]
    for k in range(truncation):
        if k % 2 == 0:
            edges.append(("1", f"y{k}", f"y{k + 1}"))
        if k % 4 in (0, 3):
            edges.append(("2", f"y{k}", f"y{k + 2}"))
    return _cell_module(a1, cells, edges, truncation, "R5")


def _build_n5(truncation):
    a1 = make_algebra("A(1)")
    cells, edges = _r3_cells_edges(truncation)
    cells += [(k + 1, f"z{k}") for k in range(truncation)]
    for k in range(truncation):
        if k % 2 == 0:
            edges.append(("1", f"z{k}", f"z{k + 1}"))
        if k % 4 in (0, 3):
            edges.append(("2", f"z{k}", f"z{k + 2}"))
    edges.append(("2", "z1", "c4"))
    return _cell_module(a1, cells, edges, truncation, "N5")


def _build_h(truncation):
    e1 = make_algebra("E(1)")
    cells = [(k, f"x{k}") for k in range(truncation + 1)]
    edges = []
    for k in range(0, truncation + 1, 2):
        edges.append(("0", f"x{k}", f"x{k + 1}"))
        edges.append(("1", f"x{k}", f"x{k + 3}"))
    return _cell_module(e1, cells, edges, truncation, "H")


def named_module(
    name: str, truncation: Optional[int] = None, algebra: Optional[str] = None
) -> FGModule:
    if name not in _ALL:
        raise IllFormed(f"unknown catalog module {name!r}")
    if name in _INFINITE and truncation is None:
        raise IllFormed(f"{name} has an infinite tail; pass a truncation degree")
    default_alg = "E(1)" if name in ("E1", "H") else "A(1)"
    if algebra is not None and algebra != default_alg and name != "F2":
        raise IllFormed(f"{name} lives over {default_alg}")

    if name == "F2":
        m = _ground(algebra or "A(1)")
    elif name == "A1":
        m = free_module(make_algebra("A(1)"), [(0, "u")])
    elif name == "E1":
        m = free_module(make_algebra("E(1)"), [(0, "u")])
    elif name == "R0":
        m = stunted_projective_module(-1, truncation)
    elif name == "R1":
        m = stunted_projective_module(-2, truncation)
    elif name == "R2":
        m = _build_r2()
    elif name == "R3":
        m = _build_r3(truncation)
    elif name == "R5":
        m = _build_r5(truncation)
    elif name == "J":
        m = _build_quotient(["12"])
    elif name == "Qbar":
        m = _build_quotient(["1", "212"])
    elif name == "N1":
        m = _build_n1()
    elif name == "N2":
        m = _build_n2()
    elif name == "N3":
        m = _build_quotient(["212"])
    elif name == "N4":
        m = _build_n4()
    elif name == "N5":
        m = _build_n5(truncation)
    else:
        m = _build_h(truncation)

    if name not in _INFINITE and truncation is not None:
        m = _crop(m, truncation)
    return m


def _crop(m: FGModule, truncation: int) -> FGModule:
    if m.truncation is not None and m.truncation <= truncation:
        return m
    if m.truncation is None and (m.space.total_dim == 0 or max(m.degrees()) <= truncation):
        return m
    dims = {t: m.dim(t) for t in m.degrees() if t <= truncation}
    labels = {t: m.labels(t) for t in dims}
    action: Dict[str, Dict[int, F2Matrix]] = {}
    for g, per_deg in m.action.items():
        dg = m.algebra.gen_degree(g)
        keep = {t: mat for t, mat in per_deg.items() if t + dg <= truncation}
        if keep:
            action[g] = keep
    return FGModule(
        m.algebra,
        GradedF2Space(dims, labels),
        action,
        truncation=truncation,
        name=m.name,
    )


# ----------------------------------------------------------------- matching


@dataclass
class MatchResult:
    parts: List[Tuple[str, int]]
    remainder: FGModule
    witnesses: List[Tuple[ModuleHom, ModuleHom]]


_MATCH_A1 = ("A1", "F2", "J", "N1", "N2", "N3", "N4", "N5", "Qbar", "R0", "R1", "R2", "R3", "R5")
_MATCH_E1 = ("E1", "F2", "H", "N1", "Qbar")


def _window_limit(m: FGModule) -> Optional[int]:
    return m.truncation


def _q_operators(m: FGModule):
    """Matrices of the two primitive operators, per degree, with their shifts."""
    alg = m.algebra
    limit = _window_limit(m)

    def q0(t):
        return m.act_gen(alg.generators[0], t)

    if alg.name == "E(1)":
        def q1(t):
            return m.act_gen("1", t)
    else:
        def q1(t):
            a = m.act_gen("1", t + 2).mul(m.act_gen("2", t))
            b = m.act_gen("2", t + 1).mul(m.act_gen("1", t))
            return a.add(b)

    return (1, q0), (3, q1)


def _margolis_homology(m: FGModule, hi: int) -> Dict[Tuple[int, int], int]:
    out = {}
    for qi, (dq, q) in enumerate(_q_operators(m)):
        for d in m.degrees():
            if d + 3 > hi:
                continue
            mat = q(d)
            ker = mat.cols - mat.rank()
            below = q(d - dq)
            out[qi, d] = ker - below.rank()
    return out


def _hom_basis(source: FGModule, target: FGModule, hi: int):
    """Basis of degree-zero module maps, as per-degree matrix dictionaries."""
    degrees = [d for d in source.degrees() if d <= hi]
    offsets = {}
    nvar = 0
    for d in degrees:
        offsets[d] = nvar
        nvar += target.dim(d) * source.dim(d)
    if nvar == 0:
        return []

    def var(d, r, c):
        return offsets[d] + r * source.dim(d) + c

    rows = []
    for g in source.algebra.generators:
        dg = source.algebra.gen_degree(g)
        for d in degrees:
            if d + dg > hi:
                continue
            smat = source.act_gen(g, d)
            tmat = target.act_gen(g, d)
            for rp in range(target.dim(d + dg)):
                for c in range(source.dim(d)):
                    eq = 0
                    if d + dg in offsets:
                        for k in range(source.dim(d + dg)):
                            if smat.entry(k, c):
                                eq ^= 1 << var(d + dg, rp, k)
                    for k in range(target.dim(d)):
                        if tmat.entry(rp, k):
                            eq ^= 1 << var(d, k, c)
                    if eq:
                        rows.append(eq)

    system = F2Matrix(len(rows), nvar, rows)
    basis = []
    for sol in system.kernel_basis():
        mats = {}
        for d in degrees:
            mat = F2Matrix(target.dim(d), source.dim(d))
            for r in range(mat.rows):
                for c in range(mat.cols):
                    if (sol >> var(d, r, c)) & 1:
                        mat.data[r] |= 1 << c
            mats[d] = mat
        basis.append(mats)
    return basis


def _section(inc: ModuleHom, hi: int) -> Optional[ModuleHom]:
    """A module map back along inc that restricts to the identity."""
    template, big = inc.source, inc.target
    degrees = [d for d in big.degrees() if d <= hi]
    offsets = {}
    nvar = 0
    for d in degrees:
        offsets[d] = nvar
        nvar += template.dim(d) * big.dim(d)

    def var(d, r, c):
        return offsets[d] + r * big.dim(d) + c

    rows = []
    rhs = []
    for g in big.algebra.generators:
        dg = big.algebra.gen_degree(g)
        for d in degrees:
            if d + dg > hi:
                continue
            bmat = big.act_gen(g, d)
            tmat = template.act_gen(g, d)
            for rp in range(template.dim(d + dg)):
                for c in range(big.dim(d)):
                    eq = 0
                    for k in range(big.dim(d + dg)):
                        if bmat.entry(k, c):
                            eq ^= 1 << var(d + dg, rp, k)
                    for k in range(template.dim(d)):
                        if tmat.entry(rp, k):
                            eq ^= 1 << var(d, k, c)
                    if eq:
                        rows.append(eq)
                        rhs.append(0)
    for d in template.degrees():
        if d > hi:
            continue
        imat = inc.mat(d)
        for r in range(template.dim(d)):
            for rr in range(template.dim(d)):
                eq = 0
                for c in range(big.dim(d)):
                    if imat.entry(c, r):
                        eq ^= 1 << var(d, rr, c)
                if eq or (rr == r):
                    rows.append(eq)
                    rhs.append(1 if rr == r else 0)

    system = F2Matrix(len(rows), nvar, rows)
    want = 0
    for i, bit in enumerate(rhs):
        want |= bit << i
    sol = system.solve(want)
    if sol is None:
        return None
    mats = {}
    for d in degrees:
        mat = F2Matrix(template.dim(d), big.dim(d))
        for r in range(mat.rows):
            for c in range(mat.cols):
                if (sol >> var(d, r, c)) & 1:
                    mat.data[r] |= 1 << c
        mats[d] = mat
    return ModuleHom(big, template, 0, mats)


def _split_search(template: FGModule, work: FGModule, hi: int):
    basis = _hom_basis(template, work, hi)
    if not basis:
        return None
    limit = (1 << len(basis)) if len(basis) <= 12 else len(basis) + 1
    codes = range(1, limit) if len(basis) <= 12 else None
    candidates = (
        codes
        if codes is not None
        else [1 << i for i in range(len(basis))] + [(1 << len(basis)) - 1]
    )
    for code in candidates:
        mats = {}
        for d in template.degrees():
            if d > hi:
                continue
            acc = F2Matrix(work.dim(d), template.dim(d))
            for i, hom in enumerate(basis):
                if (code >> i) & 1:
                    acc = acc.add(hom[d])
            mats[d] = acc
        if any(
            mats[d].rank() < template.dim(d) for d in mats
        ):
            continue
        inc = ModuleHom(template, work, 0, mats)
        ret = _section(inc, hi)
        if ret is None:
            continue
        seeds = []
        for d in work.degrees():
            if d > hi:
                continue
            for v in ret.mat(d).kernel_basis():
                seeds.append((d, v))
        complement, iota = submodule(work, seeds, prefix="m")
        return inc, ret, complement, iota
    return None


def _template(name: str, alg_name: str, window: int, shift: int) -> Optional[FGModule]:
    alg = make_algebra(alg_name)
    room = window - shift
    if name in _INFINITE:
        if room < alg.top_degree:
            return None
        base = named_module(name, truncation=room)
    else:
        if alg_name == "E(1)":
            if name == "F2":
                base = _ground("E(1)")
            elif name == "E1":
                base = named_module("E1")
            else:
                base = restrict_to_e1(named_module(name))
        else:
            base = named_module(name)
        if base.space.total_dim and max(base.degrees()) > room:
            return None
    return suspension(base, shift)


def _fits(template: FGModule, work: FGModule, hi: int) -> bool:
    for t in template.degrees():
        if t <= hi and template.dim(t) > work.dim(t):
            return False
    th = _margolis_homology(template, hi)
    wh = _margolis_homology(work, hi)
    for key, dim in th.items():
        if dim > wh.get(key, 0):
            return False
    return True


def match_named(m: FGModule, window: int) -> MatchResult:
    alg = m.algebra
    free_name = "A1" if alg.name == "A(1)" else "E1"
    names = _MATCH_A1 if alg.name == "A(1)" else _MATCH_E1

    original = _crop(m, window)
    work = original
    chain: List[ModuleHom] = []  # inclusions of successive complements
    found: List[Tuple[str, int, ModuleHom, int]] = []  # name, shift, inc, depth

    def strip_frees():
        nonlocal work
        while True:
            step = split_once(work)
            if step is None:
                return
            t0, inc, _ret, complement, iota = step
            found.append((free_name, t0, inc, len(chain)))
            chain.append(iota)
            work = complement

    strip_frees()
    progress = True
    while progress:
        progress = False
        for t_base in [t for t in work.degrees() if work.dim(t)]:
            options = []
            for name in names:
                template = _template(name, alg.name, window, t_base)
                if template is None or template.space.total_dim == 0:
                    continue
                options.append((-template.space.total_dim, name, template))
            for _, name, template in sorted(options, key=lambda o: o[:2]):
                if not _fits(template, work, window):
                    continue
                hit = _split_search(template, work, window)
                if hit is None:
                    continue
                inc, _ret, complement, iota = hit
                found.append((name, t_base, inc, len(chain)))
                chain.append(iota)
                work = complement
                strip_frees()
                progress = True
                break
            if progress:
                break

    parts: List[Tuple[str, int]] = []
    witnesses: List[Tuple[ModuleHom, ModuleHom]] = []
    order = sorted(range(len(found)), key=lambda i: (found[i][1], found[i][0], i))
    for i in order:
        name, shift, inc, depth = found[i]
        into_original = inc
        for iota in reversed(chain[:depth]):
            into_original = hom_compose(iota, into_original)
        ret = _section(into_original, window)
        if ret is None:
            raise IllFormed("split witness lost while lifting to the input module")
        parts.append((name, shift))
        witnesses.append((into_original, ret))
    return MatchResult(parts, work, witnesses)

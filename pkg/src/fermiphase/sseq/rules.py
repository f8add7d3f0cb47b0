"""Extension rules and the emit/receive resolution pass.

Exactly three rules add information without a recorded matrix or a human
assertion: the free summand rule, the rational comparison rule, and the tower
differential rule. Everything else either follows from recorded data by
product linearity, which the resolution pass computes, or stays reported as
undecided.

The resolution pass is conservative. A class counts as settled at a page only
when one of these holds: the page map out of (or into) its cell is recorded;
the cell carries a validated mark; the candidate target has no room once
kernel constraints from the product action are imposed; the candidate target
consists of tower classes whose fate a cut or a protection already fixes; or
the target column is empty with margin below the top of the window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from ..errors import Conflict, IllFormed
from ..f2homalg.bitmat import EchelonSpace, F2Matrix
from .chart import (
    READOUT_STEMS,
    AdamsChart,
    AssertionRecord,
    Slot,
    Tower,
    TowerCut,
    _TrackedSpace,
)


# ----------------------------------------------------------------- margolis


def rule_margolis(chart: AdamsChart, free_degrees) -> None:
    """Lock chart cells owed to free summands of the underlying module.

    A free summand in degree d contributes one permanent class at filtration
    zero of stem d with no differentials in or out and no extensions onto it.
    Multiplicities are validated against the chart before anything is marked;
    when every class of a cell is accounted for, the whole cell is marked.
    """
    counts: Dict[int, int] = {}
    for d in free_degrees:
        counts[int(d)] = counts.get(int(d), 0) + 1
    planned = []
    for d in sorted(counts):
        slot = (0, d)
        dim = chart.ext.dims.get(slot, 0)
        m = counts[d]
        if m > dim:
            raise Conflict(
                "more free summands than chart classes at filtration zero",
                degree=d,
                multiplicity=m,
                dim=dim,
            )
        planned.append((slot, m, m == dim))
    for slot, m, full in planned:
        chart._split_counts[slot] = chart._split_counts.get(slot, 0) + m
        if full:
            chart.add_permanent_marks(slot, (1 << i for i in range(m)))
    chart.log.append(
        {"op": "rule_margolis", "free_degrees": sorted(int(d) for d in free_degrees)}
    )
    chart._analysis = None


# ----------------------------------------------------------------- rational


def _next_symbol(chart: AdamsChart) -> str:
    taken = {cut.page for cut in chart._cuts if cut.symbolic}
    k = 1
    while True:
        sym = "r" if k == 1 else "r%d" % k
        if sym not in taken:
            return sym
        k += 1


def rule_rational(chart: AdamsChart, permitted: Dict[int, int], stems=READOUT_STEMS) -> None:
    """Match towers against rational data and fix their fates.

    Each tower either survives as a free generator, which the rational count
    permits, or supports a tower-to-tower differential into an adjacent stem.
    Only routes forced by mutual uniqueness are taken; every other dying
    tower stays a reported obligation.
    """
    towers = [tw for tw in chart.towers() if tw.stem in stems]
    by_stem: Dict[int, List[Tower]] = {}
    for tw in towers:
        by_stem.setdefault(tw.stem, []).append(tw)
    protected: List[Tower] = []
    dying: List[Tower] = []
    for n in stems:
        have = by_stem.get(n, [])
        want = permitted.get(n, 0)
        if want > len(have):
            raise Conflict(
                "rational data expects more free generators than towers",
                stem=n,
                towers=len(have),
                permitted=want,
            )
        if want == 0:
            dying.extend(have)
        elif want == len(have):
            protected.extend(have)
        else:
            raise Conflict(
                "rational data cannot choose which towers survive",
                stem=n,
                towers=len(have),
                permitted=want,
            )
    dying_stems = sorted({tw.stem for tw in dying})
    partner_sets: Dict[int, List[int]] = {}
    for n in dying_stems:
        partners = [m for m in (n - 1, n + 1) if m in dying_stems]
        if not partners:
            raise Conflict(
                "a tower must die but no adjacent stem offers a partner",
                stem=n,
            )
        partner_sets[n] = partners
    forced: List[Tuple[int, int]] = []
    for n in dying_stems:
        if partner_sets[n] != [n - 1]:
            continue
        if partner_sets.get(n - 1) != [n]:
            continue
        if len(by_stem.get(n, [])) == 1 and len(by_stem.get(n - 1, [])) == 1:
            forced.append((n, n - 1))
    for tw in protected:
        tw.status = "protected"
        for s, v in tw.rows.items():
            chart.add_permanent_marks((s, tw.stem + s), [v])
    for tw in dying:
        tw.status = "must_die"
    for src, tgt in forced:
        source = by_stem[src][0]
        target = by_stem[tgt][0]
        cut = TowerCut(
            source_stem=src,
            target_stem=tgt,
            source_base=source.base_s,
            target_base=target.base_s,
            page=_next_symbol(chart),
            min_exponent=2,
            author="rule",
            citation="",
            provenance="rational comparison",
        )
        source.status = "cut_source"
        target.status = "cut_target"
        chart._cuts.append(cut)
    chart.log.append(
        {
            "op": "rule_rational",
            "permitted": sorted([int(k), int(v)] for k, v in permitted.items()),
        }
    )
    chart._analysis = None


# --------------------------------------------------------- tower differential


def _lambda_functional(chart: AdamsChart, state, slot: Slot, vec: int) -> Optional[List[int]]:
    """Dual of vec in a basis (vec, canonical complement), per basis class."""
    coeff = chart._class_coords(state, slot, vec)
    if not coeff:
        return None
    _, _, reps = chart._slot_entry(state, slot)
    d = len(reps)
    tracked = _TrackedSpace()
    tracked.add(coeff, 1)
    for i in range(d):
        tracked.add(1 << i, 0)
    lams = []
    for i in range(d):
        left, lam = tracked.reduce(1 << i, 0)
        if left:
            return None
        lams.append(lam & 1)
    return lams


def _record_cut_matrices(chart: AdamsChart, cut: TowerCut, source: Tower, target: Tower):
    page = cut.page
    for s in sorted(source.rows):
        tgt_row = s + page
        if tgt_row not in target.rows:
            continue
        state = chart._page_state(page)
        src_slot = (s, source.stem + s)
        tgt_slot = (tgt_row, cut.target_stem + tgt_row)
        lams = _lambda_functional(chart, state, src_slot, source.rows[s])
        if lams is None:
            raise Conflict(
                "a tower class is not visible at the differential's page",
                stem=source.stem,
                row=s,
            )
        tgt_coeff = chart._class_coords(state, tgt_slot, target.rows[tgt_row])
        if not tgt_coeff:
            raise Conflict(
                "the target tower class is not visible at the differential's page",
                stem=cut.target_stem,
                row=tgt_row,
            )
        _, _, tgt_reps = chart._slot_entry(state, tgt_slot)
        rows = []
        for j in range(len(tgt_reps)):
            row = 0
            if tgt_coeff >> j & 1:
                for i, lam in enumerate(lams):
                    if lam:
                        row |= 1 << i
            rows.append(row)
        chart.record_differential(
            page,
            src_slot,
            rows,
            author=cut.author,
            citation=cut.citation,
            _log=False,
        )


def _tower_image(chart: AdamsChart, name: str, tau: int, tower: Tower) -> Optional[Tower]:
    """The tower the product carries this one onto, when that is verified."""
    new_stem = tower.stem + tau - 1
    candidates = chart.towers_in_stem(new_stem)
    if not candidates:
        return None
    hit: Optional[Tower] = None
    for s in sorted(tower.rows):
        t = tower.stem + s
        if not chart.ext.verified(s, t):
            continue
        img = chart.ext.product_matrix(name, s, t).apply(tower.rows[s])
        if img == 0:
            return None
        matches = [tw for tw in candidates if tw.rows.get(s + 1) == img]
        if len(matches) != 1:
            return None
        if hit is None:
            hit = matches[0]
        elif hit is not matches[0]:
            return None
    return hit


def _translate_cut(chart: AdamsChart, cut: TowerCut, source: Tower, target: Tower):
    """Derive image cuts along products of positive stem shift.

    Validation is strict: every verified row of both towers must map onto the
    rows of a single detected tower in the shifted stem; any failure stops the
    derivation chain with no effect.
    """
    for name, tau in chart.products:
        if tau - 1 <= 0:
            continue
        src_tw, tgt_tw, base_cut = source, target, cut
        while True:
            new_src = _tower_image(chart, name, tau, src_tw)
            new_tgt = _tower_image(chart, name, tau, tgt_tw)
            if new_src is None or new_tgt is None:
                break
            if new_src is new_tgt:
                break
            if new_src.status not in ("open", "must_die"):
                break
            if new_tgt.status not in ("open", "must_die"):
                break
            new_cut = TowerCut(
                source_stem=new_src.stem,
                target_stem=new_tgt.stem,
                source_base=new_src.base_s,
                target_base=new_tgt.base_s,
                page=base_cut.page,
                min_exponent=base_cut.min_exponent,
                author=base_cut.author,
                citation=base_cut.citation,
                provenance="translated along %s" % name,
            )
            new_src.status = "cut_source"
            new_tgt.status = "cut_target"
            chart._cuts.append(new_cut)
            if not new_cut.symbolic:
                _record_cut_matrices(chart, new_cut, new_src, new_tgt)
            src_tw, tgt_tw, base_cut = new_src, new_tgt, new_cut


def rule_tower_differential(chart: AdamsChart, fact: AssertionRecord) -> None:
    """Apply an order fact pinning a tower-to-tower differential's page."""
    if fact.kind != "bockstein_order":
        raise IllFormed("tower differential facts have kind bockstein_order")
    if fact.author == "human" and not fact.citation.strip():
        raise IllFormed("human assertions carry a citation")
    payload = fact.payload
    src_stem = payload.get("source_stem")
    tgt_stem = payload.get("target_stem")
    if src_stem is None or tgt_stem is None:
        raise IllFormed("the fact names source_stem and target_stem")
    if tgt_stem != src_stem - 1:
        raise IllFormed("a tower differential drops the stem by one")
    exponent = payload.get("exponent")
    symbol = payload.get("symbol")
    if (exponent is None) == (symbol is None):
        raise IllFormed("give either a concrete exponent or a symbol")
    if exponent is not None and (not isinstance(exponent, int) or exponent < 1):
        raise IllFormed("the exponent is a positive integer")
    min_exponent = int(payload.get("min_exponent", 2))
    page = exponent if exponent is not None else symbol
    existing = [
        c for c in chart._cuts if (c.source_stem, c.target_stem) == (src_stem, tgt_stem)
    ]
    if existing:
        cut = existing[0]
        if cut.page == page:
            chart.log.append({"op": "rule_tower_differential", "fact": fact.to_json()})
            return
        if not cut.symbolic:
            raise Conflict(
                "a concrete tower differential is already recorded here",
                source_stem=src_stem,
            )
        cut.page = page
        if exponent is None:
            cut.min_exponent = min_exponent
        cut.author = fact.author
        cut.citation = fact.citation
        sources = [tw for tw in chart.towers_in_stem(src_stem) if tw.status == "cut_source"]
        targets = [tw for tw in chart.towers_in_stem(tgt_stem) if tw.status == "cut_target"]
        if len(sources) != 1 or len(targets) != 1:
            raise Conflict("the existing route does not pick out a unique tower pair")
        source, target = sources[0], targets[0]
    else:
        sources = [
            tw for tw in chart.towers_in_stem(src_stem) if tw.status in ("open", "must_die")
        ]
        targets = [
            tw for tw in chart.towers_in_stem(tgt_stem) if tw.status in ("open", "must_die")
        ]
        if len(sources) != 1 or len(targets) != 1:
            raise IllFormed(
                "the fact does not pick out a unique tower pair",
                source_stem=src_stem,
                target_stem=tgt_stem,
            )
        source, target = sources[0], targets[0]
        cut = TowerCut(
            source_stem=src_stem,
            target_stem=tgt_stem,
            source_base=source.base_s,
            target_base=target.base_s,
            page=page,
            min_exponent=min_exponent,
            author=fact.author,
            citation=fact.citation,
            provenance="order fact",
        )
        source.status = "cut_source"
        target.status = "cut_target"
        chart._cuts.append(cut)
    if not cut.symbolic:
        _record_cut_matrices(chart, cut, source, target)
    _translate_cut(chart, cut, source, target)
    chart.log.append({"op": "rule_tower_differential", "fact": fact.to_json()})
    chart._analysis = None


# ------------------------------------------------------------- propagation


@dataclass
class ChartAnalysis:
    """Emit/receive resolution state at the last computed page."""

    final_page: int
    alive: Dict[Slot, Tuple[int, ...]] = field(default_factory=dict)
    undecided: List[Tuple[Slot, int, Slot]] = field(default_factory=list)
    window_edge: List[Slot] = field(default_factory=list)

    def undecided_for_stem(self, n: int) -> List[str]:
        out = set()
        for (s, t), r, (s2, t2) in self.undecided:
            if t - s == n or t2 - s2 == n:
                out.add("possible d%d %d:%d -> %d:%d" % (r, s, t, s2, t2))
        for s, t in self.window_edge:
            if t - s == n:
                out.add(
                    "possible differential from %d:%d beyond the computed window"
                    % (s, t)
                )
        return sorted(out)


def _mark_coeffs(chart: AdamsChart, state, slot: Slot, space) -> EchelonSpace:
    out = EchelonSpace()
    if space is None:
        return out
    for v in space.basis:
        coeff = chart._class_coords(state, slot, v)
        if coeff:
            out.add(coeff)
    return out


def _tower_vectors_at(chart: AdamsChart, slot: Slot, statuses) -> List[int]:
    s, t = slot
    out = []
    for tw in chart.towers_in_stem(t - s):
        if tw.status in statuses and s in tw.rows:
            out.append(tw.rows[s])
    return out


def _h0_order(chart: AdamsChart, state, slot: Slot, coeff: int) -> Optional[int]:
    """Least k with the k-fold h0 image dead, or None if undecided in-grid."""
    s, t = slot
    cur = coeff
    k = 0
    while True:
        if cur == 0:
            return k
        if not chart.ext.verified(s + k, t + k):
            return None
        mat = chart._induced_product(state, "h0", (s + k, t + k))
        if mat is None:
            return None
        cur = mat.apply(cur)
        k += 1
        if s + k > chart.s_max or t + k > chart.t_max:
            return k if cur == 0 else None


def _intersect_kernels(constraints: List[F2Matrix], d: int) -> List[int]:
    if not constraints:
        return [1 << i for i in range(d)]
    stacked: List[int] = []
    for mat in constraints:
        stacked.extend(mat.data)
    return F2Matrix(len(stacked), d, stacked).kernel_basis()


def _emission_possible(chart: AdamsChart, state, r: int, slot: Slot, coeff: int) -> bool:
    """Whether a nonzero page-r image for this class survives all constraints."""
    s, t = slot
    tgt = (s + r, t + r - 1)
    _, _, tgt_reps = chart._slot_entry(state, tgt)
    d = len(tgt_reps)
    if d == 0:
        return False
    excluded = _mark_coeffs(chart, state, tgt, chart._no_receive_perm.get(tgt))
    for v in _tower_vectors_at(chart, tgt, ("protected", "cut_source", "cut_target")):
        c = chart._class_coords(state, tgt, v)
        if c:
            excluded.add(c)
    constraints: List[F2Matrix] = []
    rec_out = chart._records.get((r, tgt[0], tgt[1]))
    if rec_out is not None:
        entries = []
        for j, row in enumerate(rec_out["rows"]):
            for i in range(d):
                if row >> i & 1:
                    entries.append((j, i))
        constraints.append(F2Matrix.from_entries(len(rec_out["rows"]), d, entries))
    if chart.ext.verified(s, t) and chart.ext.verified(tgt[0], tgt[1]):
        for name, _ in chart.products:
            gsrc = chart._induced_product(state, name, slot)
            gtgt = chart._induced_product(state, name, tgt)
            if gsrc is None or gtgt is None:
                continue
            if gsrc.apply(coeff) == 0:
                constraints.append(gtgt)
        order = _h0_order(chart, state, slot, coeff)
        if order is not None and order > 0:
            mat = F2Matrix.identity(d)
            usable = True
            for k in range(order):
                step_slot = (tgt[0] + k, tgt[1] + k)
                if not chart.ext.verified(step_slot[0], step_slot[1]):
                    usable = False
                    break
                step = chart._induced_product(state, "h0", step_slot)
                if step is None:
                    usable = False
                    break
                mat = step.mul(mat)
            if usable:
                constraints.append(mat)
    kernel = _intersect_kernels(constraints, d)
    room = EchelonSpace(excluded.basis)
    for v in kernel:
        if room.add(v):
            return True
    return False


def _beyond_window_excluded(chart: AdamsChart, state, slot: Slot, coeff: int) -> bool:
    """Whether emissions past the computed window are ruled out for the class."""
    s, t = slot
    col = t - s - 1
    if col < 0:
        return True
    c = chart.stem_ceiling(col)
    if c < 0:
        return True
    towers = chart.towers_in_stem(col) if col in READOUT_STEMS else []
    tower_rows: Dict[int, List[int]] = {}
    for tw in towers:
        for row, v in tw.rows.items():
            tower_rows.setdefault(row, []).append(v)
    top_nt = -1
    for row in range(c, -1, -1):
        d = chart.ext.dims.get((row, col + row), 0)
        if d == 0:
            continue
        span = EchelonSpace(tower_rows.get(row, []))
        if d > span.dim:
            top_nt = row
            break
    if col not in READOUT_STEMS:
        occupied = [row for row in range(0, c + 1) if chart.ext.dims.get((row, col + row), 0)]
        return max(occupied, default=-1) <= c - 2
    if top_nt > c - 2:
        return False
    unresolved = [tw for tw in towers if tw.status in ("open", "must_die")]
    if not unresolved:
        return True
    return _h0_order(chart, state, slot, coeff) is not None


def compute_analysis(chart: AdamsChart) -> ChartAnalysis:
    final = chart._max_record_page() + 1
    fstate = chart._page_state(final)
    analysis = ChartAnalysis(final_page=final)
    for slot, entry in fstate.items():
        if entry[2]:
            analysis.alive[slot] = entry[2]
    cut_source_rows: Dict[Slot, List[int]] = {}
    for tw in chart.towers():
        if tw.status == "cut_source":
            for s, v in tw.rows.items():
                cut_source_rows.setdefault((s, tw.stem + s), []).append(v)
    undecided: Set[Tuple[Slot, int, Slot]] = set()
    window_edge: Set[Slot] = set()

    def skip_span(state, slot) -> EchelonSpace:
        span = _mark_coeffs(chart, state, slot, chart._no_emit_perm.get(slot))
        for v in cut_source_rows.get(slot, ()):
            c = chart._class_coords(state, slot, v)
            if c:
                span.add(c)
        return span

    for slot in sorted(slot for slot, d in chart.ext.dims.items() if d > 0):
        s, t = slot
        r_in = min(chart.s_max - s, chart.t_max - t + 1)
        for r in range(2, r_in + 1):
            state = chart._page_state(r)
            _, _, reps = chart._slot_entry(state, slot)
            if not reps:
                break
            if (r, s, t) in chart._records:
                continue
            if (s, t, r) in chart._no_emit_page:
                continue
            tgt = (s + r, t + r - 1)
            if not chart._slot_entry(state, tgt)[2]:
                continue
            span = skip_span(state, slot)
            for i in range(len(reps)):
                if not span.reduce(1 << i):
                    continue
                if _emission_possible(chart, state, r, slot, 1 << i):
                    undecided.add((slot, r, tgt))
                    break
        _, _, freps = chart._slot_entry(fstate, slot)
        if freps:
            span = skip_span(fstate, slot)
            for i in range(len(freps)):
                if not span.reduce(1 << i):
                    continue
                if not _beyond_window_excluded(chart, fstate, slot, 1 << i):
                    window_edge.add(slot)
                    break
    analysis.undecided = sorted(undecided)
    analysis.window_edge = sorted(window_edge)
    return analysis


def rule_product_propagation(chart: AdamsChart) -> ChartAnalysis:
    """Run the emit/receive resolution pass and log that it ran."""
    analysis = chart.analysis()
    chart.log.append({"op": "rule_product_propagation"})
    return analysis

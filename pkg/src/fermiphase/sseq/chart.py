"""Deduction state for an Adams-style chart built on a resolved Ext term.

Three layers sit on top of the starting term and none is ever extrapolated
silently:

  * recorded differentials: exact matrices at a named page, validated for
    shape, for squaring to zero against other records on the same page, and
    for compatibility with the product action;
  * marks: subspaces known not to emit or not to receive any differential,
    either permanently or at a single page, with their author and citation;
  * tower accounting: infinite multiplication columns, their protection or
    death, and the page of a tower-to-tower differential.

Pages above two are plain homology with respect to the recorded matrices, so
an unrecorded differential contributes zero to page arithmetic. Readouts stay
honest because the readout layer only trusts a class once every candidate
emission and receipt is excluded by a mark, a record, a tower fact, or grid
geometry (an empty capped column). All derived choices run over deterministic
echelon bases, so identical inputs and logs reproduce identical state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..errors import Conflict, IllFormed
from ..f2homalg.bitmat import EchelonSpace, F2Matrix
from ..resolve.ext import PRODUCT_DEGREES, ExtChart

Slot = Tuple[int, int]

READOUT_STEMS = range(0, 9)

ASSERTION_KINDS = (
    "differential",
    "no_differential",
    "hidden_extension",
    "no_hidden_extension",
    "bockstein_order",
)


@dataclass(frozen=True)
class AssertionRecord:
    kind: str
    payload: dict
    author: str
    citation: str = ""

    def key_json(self) -> str:
        return json.dumps(
            {"kind": self.kind, "payload": self.payload},
            sort_keys=True,
        )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "payload": self.payload,
            "author": self.author,
            "citation": self.citation,
        }


@dataclass
class Tower:
    """A multiplication column reaching the top of the computed window."""

    stem: int
    base_s: int
    top_s: int
    rows: Dict[int, int]
    status: str = "open"

    def key(self) -> Tuple[int, int, int]:
        return (self.stem, self.base_s, self.rows[self.base_s])

    def to_json(self) -> dict:
        return {
            "stem": self.stem,
            "base_s": self.base_s,
            "top_s": self.top_s,
            "rows": {str(s): v for s, v in sorted(self.rows.items())},
            "status": self.status,
        }


@dataclass
class TowerCut:
    """A tower-to-tower differential, concrete or with a symbolic page."""

    source_stem: int
    target_stem: int
    source_base: int
    target_base: int
    page: object
    min_exponent: int = 2
    author: str = "rule"
    citation: str = ""
    provenance: str = ""

    @property
    def symbolic(self) -> bool:
        return not isinstance(self.page, int)

    def survivor_exponent_offset(self) -> int:
        return self.source_base - self.target_base

    def to_json(self) -> dict:
        return {
            "source_stem": self.source_stem,
            "target_stem": self.target_stem,
            "source_base": self.source_base,
            "target_base": self.target_base,
            "page": self.page,
            "min_exponent": self.min_exponent,
            "author": self.author,
            "citation": self.citation,
            "provenance": self.provenance,
        }


class _TrackedSpace:
    """Reduced echelon rows with coefficient masks, fully deterministic."""

    __slots__ = ("rows",)

    def __init__(self):
        self.rows: List[Tuple[int, int]] = []

    def reduce(self, v: int, c: int = 0) -> Tuple[int, int]:
        for bv, bc in self.rows:
            if v & (bv & -bv):
                v ^= bv
                c ^= bc
        return v, c

    def add(self, v: int, c: int) -> bool:
        v, c = self.reduce(v, c)
        if v == 0:
            return False
        piv = v & -v
        for i, (bv, bc) in enumerate(self.rows):
            if bv & piv:
                self.rows[i] = (bv ^ v, bc ^ c)
        self.rows.append((v, c))
        self.rows.sort(key=lambda r: r[0] & -r[0])
        return True


def coeff_kernel(vectors: Sequence[int]) -> List[int]:
    """Masks c with xor of the chosen vectors zero, in echelon order."""
    space = _TrackedSpace()
    out = []
    for i, v in enumerate(vectors):
        if not space.add(v, 1 << i):
            _, c = space.reduce(v, 1 << i)
            out.append(c)
    return out


def _xor_select(vectors: Sequence[int], mask: int) -> int:
    acc = 0
    i = 0
    while mask:
        if mask & 1:
            acc ^= vectors[i]
        mask >>= 1
        i += 1
    return acc


class PageView:
    """Read-only dimensions of one page."""

    def __init__(self, state: Dict[Slot, Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]]):
        self._state = state

    def dim(self, s: int, t: int) -> int:
        entry = self._state.get((s, t))
        return len(entry[2]) if entry else 0

    @property
    def dims(self) -> Dict[Slot, int]:
        return {slot: len(entry[2]) for slot, entry in self._state.items() if entry[2]}


class AdamsChart:
    """Mutable deduction state over an Ext chart."""

    def __init__(self, ext: ExtChart):
        self.ext = ext
        self.s_max = ext.s_max
        self.t_max = ext.t_max
        self.products = tuple(PRODUCT_DEGREES[ext.algebra])
        self._records: Dict[Tuple[int, int, int], dict] = {}
        self._no_emit_perm: Dict[Slot, EchelonSpace] = {}
        self._no_receive_perm: Dict[Slot, EchelonSpace] = {}
        self._no_emit_page: set = set()
        self._split_counts: Dict[Slot, int] = {}
        self._ext_asserts: List[dict] = []
        self._assert_seen: set = set()
        self._towers: Optional[List[Tower]] = None
        self._cuts: List[TowerCut] = []
        self.log: List[dict] = []
        self._pages: Dict[int, dict] = {}
        self._analysis = None

    # -------------------------------------------------------------- pages

    def _initial_state(self) -> dict:
        state = {}
        for slot, d in self.ext.dims.items():
            if d > 0:
                basis = tuple(1 << i for i in range(d))
                state[slot] = (basis, (), basis)
        return state

    def _max_record_page(self) -> int:
        return max((p for (p, _, _) in self._records), default=1)

    def _page_state(self, r: int) -> dict:
        top = self._max_record_page() + 1
        r = max(2, min(r, top))
        if 2 not in self._pages:
            self._pages[2] = self._initial_state()
        known = max(p for p in self._pages if p <= r)
        state = self._pages[known]
        for p in range(known, r):
            state = self._advance(state, p)
            self._pages[p + 1] = state
        return state

    def _advance(self, state: dict, r: int) -> dict:
        records = [
            ((s, t), rec)
            for (p, s, t), rec in sorted(self._records.items())
            if p == r
        ]
        if not records:
            return state
        new = dict(state)
        boundary_adds: Dict[Slot, List[int]] = {}
        kernel_repl: Dict[Slot, List[int]] = {}
        for (s, t), rec in records:
            tgt = (s + r, t + r - 1)
            pairs = rec["pairs"]
            imgs = [img for _, img in pairs if img]
            if imgs:
                boundary_adds.setdefault(tgt, []).extend(imgs)
            _, tb, _ = state.get(tgt, ((), (), ()))
            bsp = EchelonSpace(tb)
            residues = [bsp.reduce(img) for _, img in pairs]
            srcs = [v for v, _ in pairs]
            _, sb, _ = state.get((s, t), ((), (), ()))
            combos = list(sb)
            for mask in coeff_kernel(residues):
                combos.append(_xor_select(srcs, mask))
            kernel_repl[(s, t)] = combos
        touched = set(boundary_adds) | set(kernel_repl)
        for slot in sorted(touched):
            z, b, _ = state.get(slot, ((), (), ()))
            if slot in kernel_repl:
                zsp = EchelonSpace(kernel_repl[slot])
            else:
                zsp = EchelonSpace(z)
            bsp = EchelonSpace(b)
            for img in boundary_adds.get(slot, ()):
                bsp.add(img)
            reps = []
            acc = EchelonSpace(bsp.basis)
            for v in zsp.basis:
                w = acc.reduce(v)
                if w:
                    acc.add(w)
                    reps.append(w)
            new[slot] = (tuple(zsp.basis), tuple(bsp.basis), tuple(reps))
        return new

    def page(self, r: int) -> PageView:
        if r < 2:
            raise IllFormed("pages start at two", page=r)
        return PageView(self._page_state(r))

    def _slot_entry(self, state: dict, slot: Slot):
        return state.get(slot, ((), (), ()))

    def _class_coords(self, state: dict, slot: Slot, vec: int) -> Optional[int]:
        """Coefficient mask of vec's class over the slot's page basis."""
        if vec == 0:
            return 0
        _, b, reps = self._slot_entry(state, slot)
        tracked = _TrackedSpace()
        for bv in b:
            tracked.add(bv, 0)
        for i, rep in enumerate(reps):
            tracked.add(rep, 1 << i)
        left, coeff = tracked.reduce(vec, 0)
        if left:
            return None
        return coeff & ((1 << len(reps)) - 1)

    def _induced_product(self, state: dict, name: str, slot: Slot) -> Optional[F2Matrix]:
        """Product action on page classes, or None at an equivariance hole."""
        tau = dict(self.products)[name]
        s, t = slot
        tgt = (s + 1, t + tau)
        _, _, src_reps = self._slot_entry(state, slot)
        _, _, tgt_reps = self._slot_entry(state, tgt)
        mat = self.ext.product_matrix(name, s, t)
        cols = []
        for rep in src_reps:
            w = mat.apply(rep)
            coeff = self._class_coords(state, tgt, w)
            if coeff is None:
                return None
            cols.append(coeff)
        entries = []
        for i, coeff in enumerate(cols):
            for j in range(len(tgt_reps)):
                if coeff >> j & 1:
                    entries.append((j, i))
        return F2Matrix.from_entries(len(tgt_reps), len(src_reps), entries)

    # ------------------------------------------------------------ records

    def _invalidate(self, above_page: int):
        for p in [p for p in self._pages if p > above_page]:
            del self._pages[p]
        self._analysis = None

    def record_differential(self, page, source, rows, author="rule", citation="", _log=True):
        if not isinstance(page, int) or page < 2:
            raise IllFormed("differential page must be an integer at least two", page=page)
        s, t = source
        if self._records and page < self._max_record_page():
            existing = self._records.get((page, s, t))
            if existing is None or tuple(existing["rows"]) != tuple(rows):
                raise IllFormed(
                    "records must be added in nondecreasing page order",
                    page=page,
                )
        tgt = (s + page, t + page - 1)
        state = self._page_state(page)
        _, _, src_reps = self._slot_entry(state, (s, t))
        _, _, tgt_reps = self._slot_entry(state, tgt)
        rows = [int(r) for r in rows]
        if len(rows) != len(tgt_reps):
            raise IllFormed(
                "matrix has one row per class of the target at this page",
                expected=len(tgt_reps),
                got=len(rows),
            )
        if any(r >> len(src_reps) for r in rows):
            raise IllFormed(
                "matrix column indexes a class that the source does not have",
                source_dim=len(src_reps),
            )
        if not any(rows):
            raise IllFormed(
                "a zero differential is stated with a no_differential assertion"
            )
        existing = self._records.get((page, s, t))
        if existing is not None:
            if tuple(existing["rows"]) == tuple(rows):
                return
            raise Conflict(
                "a different matrix is already recorded at this cell",
                page=page,
                source=[s, t],
            )
        if (s, t, page) in self._no_emit_page:
            raise Conflict(
                "the source is asserted not to emit at this page",
                page=page,
                source=[s, t],
            )
        pairs = []
        for i, rep in enumerate(src_reps):
            img = 0
            for j, row in enumerate(rows):
                if row >> i & 1:
                    img ^= tgt_reps[j]
            pairs.append((rep, img))
        self._check_marks_for_record(state, (s, t), tgt, pairs)
        self._check_squares(state, page, (s, t), tgt, pairs, rows)
        self._check_translates(state, page, (s, t), pairs)
        self._records[(page, s, t)] = {
            "rows": tuple(rows),
            "pairs": tuple(pairs),
            "author": author,
            "citation": citation,
        }
        if _log:
            self.log.append(
                {
                    "op": "record_differential",
                    "page": page,
                    "source": [s, t],
                    "rows": list(rows),
                    "author": author,
                    "citation": citation,
                }
            )
        self._invalidate(page)

    def _check_marks_for_record(self, state, source, tgt, pairs):
        mark = self._no_emit_perm.get(source)
        if mark is not None:
            tracked = _TrackedSpace()
            for i, (rep, img) in enumerate(pairs):
                tracked.add(rep, 1 << i)
            _, _, tb = self._slot_entry(state, tgt)
            bsp = EchelonSpace(self._slot_entry(state, tgt)[1])
            for v in mark.basis:
                left, coeff = tracked.reduce(v, 0)
                if left:
                    continue
                img = 0
                for i, (_, im) in enumerate(pairs):
                    if coeff >> i & 1:
                        img ^= im
                if bsp.reduce(img):
                    raise Conflict(
                        "the source contains a class marked as never emitting",
                        source=list(source),
                    )
        block = self._no_receive_perm.get(tgt)
        if block is not None:
            span = EchelonSpace(block.basis)
            before = span.dim
            grew = EchelonSpace(block.basis)
            for _, img in pairs:
                if img and not grew.add(img):
                    raise Conflict(
                        "the image lands on a class marked as never receiving",
                        target=list(tgt),
                    )
            del before, span

    def _check_squares(self, state, page, source, tgt, pairs, rows):
        out = self._records.get((page, tgt[0], tgt[1]))
        if out is not None:
            far = (tgt[0] + page, tgt[1] + page - 1)
            bsp = EchelonSpace(self._slot_entry(state, far)[1])
            for _, img in pairs:
                coeff = self._class_coords(state, tgt, img)
                if coeff is None:
                    continue
                img2 = 0
                for j, (_, im2) in enumerate(out["pairs"]):
                    if coeff >> j & 1:
                        img2 ^= im2
                if bsp.reduce(img2):
                    raise Conflict(
                        "composite of recorded differentials is nonzero",
                        source=list(source),
                    )
        pre = (source[0] - page, source[1] - page + 1)
        rec_in = self._records.get((page, pre[0], pre[1]))
        if rec_in is not None:
            bsp = EchelonSpace(self._slot_entry(state, tgt)[1])
            for _, img in rec_in["pairs"]:
                coeff = self._class_coords(state, source, img)
                if coeff is None:
                    continue
                img2 = 0
                for i, (_, im2) in enumerate(pairs):
                    if coeff >> i & 1:
                        img2 ^= im2
                if bsp.reduce(img2):
                    raise Conflict(
                        "composite of recorded differentials is nonzero",
                        source=list(pre),
                    )

    def _slot_fully_marked(self, space: Optional[EchelonSpace], slot: Slot) -> bool:
        if space is None:
            return False
        return space.dim >= self.ext.dims.get(slot, 0) > 0

    def _check_translates(self, state, page, source, pairs):
        s, t = source
        for name, tau in self.products:
            up = (s + 1, t + tau)
            up_tgt = (up[0] + page, up[1] + page - 1)
            pmat = self.ext.product_matrix(name, s, t)
            tgt = (s + page, t + page - 1)
            qmat = self.ext.product_matrix(name, tgt[0], tgt[1])
            rec_up = self._records.get((page, up[0], up[1]))
            bsp_far = EchelonSpace(self._slot_entry(state, up_tgt)[1])
            for rep, img in pairs:
                gsrc = pmat.apply(rep)
                required = qmat.apply(img)
                lhs_known = None
                if rec_up is not None:
                    coeff = self._class_coords(state, up, gsrc)
                    if coeff is not None:
                        lhs = 0
                        for i, (_, im) in enumerate(rec_up["pairs"]):
                            if coeff >> i & 1:
                                lhs ^= im
                        lhs_known = lhs
                if lhs_known is not None:
                    if bsp_far.reduce(lhs_known ^ required):
                        raise Conflict(
                            "recorded differentials disagree along a product",
                            product=name,
                            source=[s, t],
                        )
                else:
                    if bsp_far.reduce(required):
                        gsrc_coeff = self._class_coords(state, up, gsrc)
                        if gsrc_coeff:
                            if self._slot_fully_marked(self._no_emit_perm.get(up), up) or (
                                up[0], up[1], page
                            ) in self._no_emit_page:
                                raise Conflict(
                                    "a product translate must emit but is marked",
                                    product=name,
                                    translate=list(up),
                                )
            down = (s - 1, t - tau)
            rec_down = self._records.get((page, down[0], down[1]))
            dmat = self.ext.product_matrix(name, down[0], down[1])
            down_tgt = (down[0] + page, down[1] + page - 1)
            emat = self.ext.product_matrix(name, down_tgt[0], down_tgt[1])
            bsp_tgt = EchelonSpace(self._slot_entry(state, tgt)[1])
            if rec_down is not None:
                for rep, img in rec_down["pairs"]:
                    u = dmat.apply(rep)
                    coeff = self._class_coords(state, source, u)
                    if coeff is None:
                        continue
                    lhs = 0
                    for i, (_, im) in enumerate(pairs):
                        if coeff >> i & 1:
                            lhs ^= im
                    if bsp_tgt.reduce(lhs ^ emat.apply(img)):
                        raise Conflict(
                            "recorded differentials disagree along a product",
                            product=name,
                            source=list(down),
                        )
            elif self._slot_fully_marked(self._no_emit_perm.get(down), down):
                for i in range(self.ext.dims.get(down, 0)):
                    u = dmat.apply(1 << i)
                    coeff = self._class_coords(state, source, u)
                    if not coeff:
                        continue
                    lhs = 0
                    for k, (_, im) in enumerate(pairs):
                        if coeff >> k & 1:
                            lhs ^= im
                    if bsp_tgt.reduce(lhs):
                        raise Conflict(
                            "the map must vanish on the image of a marked slot",
                            product=name,
                            translate=list(down),
                        )

    # ---------------------------------------------------------- assertions

    def assert_record(self, rec: AssertionRecord):
        if rec.kind not in ASSERTION_KINDS:
            raise IllFormed("unknown assertion kind", kind=rec.kind)
        if rec.author == "human" and not rec.citation.strip():
            raise IllFormed("human assertions carry a citation")
        key = rec.key_json()
        if key in self._assert_seen:
            return
        if rec.kind == "differential":
            payload = rec.payload
            self.record_differential(
                payload["page"],
                tuple(payload["source"]),
                payload.get("rows", payload.get("matrix")),
                author=rec.author,
                citation=rec.citation,
                _log=False,
            )
        elif rec.kind == "no_differential":
            self._apply_no_differential(rec)
        elif rec.kind in ("hidden_extension", "no_hidden_extension"):
            self._apply_extension_assert(rec)
        elif rec.kind == "bockstein_order":
            from .rules import rule_tower_differential

            rule_tower_differential(self, rec)
            self._assert_seen.add(key)
            return
        self._assert_seen.add(key)
        self.log.append({"op": "assert", **rec.to_json()})
        self._analysis = None

    def _apply_no_differential(self, rec: AssertionRecord):
        payload = rec.payload
        if "source" not in payload or "page" not in payload:
            raise IllFormed("no_differential names a source and a page")
        s, t = payload["source"]
        page = payload["page"]
        if page is not None and (not isinstance(page, int) or page < 2):
            raise IllFormed("page is an integer at least two, or null")
        if not (0 <= s <= self.s_max and 0 <= t <= self.t_max):
            raise IllFormed("source lies outside the computed window")
        if "target" in payload and payload["target"] is not None:
            if page is None:
                raise IllFormed("a target only makes sense with a page")
            want = [s + page, t + page - 1]
            if list(payload["target"]) != want:
                raise IllFormed("target does not match the source and page", expected=want)
        vector = payload.get("vector")
        if vector is not None and page is not None:
            raise IllFormed("vector marks are only permanent")
        for (p, rs, rt), stored in self._records.items():
            if (rs, rt) != (s, t):
                continue
            if page is not None and p != page:
                continue
            if any(img for _, img in stored["pairs"]):
                raise Conflict(
                    "a nonzero differential is already recorded here",
                    page=p,
                    source=[s, t],
                )
        self._check_no_differential_closure((s, t), page)
        if page is None:
            space = self._no_emit_perm.setdefault((s, t), EchelonSpace())
            if vector is None:
                for i in range(self.ext.dims.get((s, t), 0)):
                    space.add(1 << i)
            else:
                space.add(int(vector))
        else:
            self._no_emit_page.add((s, t, page))

    def _check_no_differential_closure(self, slot: Slot, page):
        s, t = slot
        for name, tau in self.products:
            pre = (s - 1, t - tau)
            for (p, rs, rt), stored in self._records.items():
                if (rs, rt) != pre:
                    continue
                if page is not None and p != page:
                    continue
                state = self._page_state(p)
                pmat = self.ext.product_matrix(name, pre[0], pre[1])
                tgt_pre = (pre[0] + p, pre[1] + p - 1)
                qmat = self.ext.product_matrix(name, tgt_pre[0], tgt_pre[1])
                here_tgt = (s + p, t + p - 1)
                bsp = EchelonSpace(self._slot_entry(state, here_tgt)[1])
                for rep, img in stored["pairs"]:
                    u = self._class_coords(state, slot, pmat.apply(rep))
                    if not u:
                        continue
                    if bsp.reduce(qmat.apply(img)):
                        raise Conflict(
                            "a recorded differential forces this slot to emit",
                            page=p,
                            source=[s, t],
                        )

    def _apply_extension_assert(self, rec: AssertionRecord):
        payload = rec.payload
        for keyname in ("stem", "lower", "upper"):
            if keyname not in payload:
                raise IllFormed("extension assertions name stem, lower, upper")
        stem = payload["stem"]
        lower = tuple(payload["lower"])
        upper = tuple(payload["upper"])
        for cell in (lower, upper):
            if cell[1] - cell[0] != stem:
                raise IllFormed("extension cells lie in the named stem")
            if self.ext.dims.get(cell, 0) <= 0:
                raise IllFormed("extension cell is empty", cell=list(cell))
        if upper[0] <= lower[0]:
            raise IllFormed("the upper cell sits strictly above the lower cell")
        opposite = (
            "no_hidden_extension" if rec.kind == "hidden_extension" else "hidden_extension"
        )
        for prior in self._ext_asserts:
            if (
                prior["kind"] == opposite
                and prior["stem"] == stem
                and prior["lower"] == list(lower)
                and prior["upper"] == list(upper)
            ):
                raise Conflict("the opposite extension statement is already asserted")
        self._ext_asserts.append(
            {"kind": rec.kind, "stem": stem, "lower": list(lower), "upper": list(upper)}
        )

    # -------------------------------------------------------------- towers

    def stem_ceiling(self, n: int) -> int:
        return min(self.s_max, self.t_max - n)

    def towers(self) -> Tuple[Tower, ...]:
        if self._towers is None:
            self._towers = self._detect_towers()
        return tuple(self._towers)

    def _detect_towers(self) -> List[Tower]:
        out: List[Tower] = []
        for n in READOUT_STEMS:
            c = self.stem_ceiling(n)
            if c < 0:
                continue
            dims = {s: self.ext.dims.get((s, n + s), 0) for s in range(0, c + 1)}
            if not any(dims.values()):
                continue
            comp: Dict[int, F2Matrix] = {c: F2Matrix.identity(dims[c])}
            for s in range(c - 1, -1, -1):
                h = self.ext.product_matrix("h0", s, n + s)
                comp[s] = comp[s + 1].mul(h)
            reached = EchelonSpace()
            for s in range(0, c + 1):
                if dims[s] == 0:
                    continue
                for i in range(dims[s]):
                    top_img = comp[s].column(i)
                    if top_img and reached.add(top_img):
                        rows = {s: 1 << i}
                        v = 1 << i
                        for s2 in range(s, c):
                            v = self.ext.product_matrix("h0", s2, n + s2).apply(v)
                            rows[s2 + 1] = v
                        out.append(Tower(stem=n, base_s=s, top_s=c, rows=rows))
        return out

    @property
    def cuts(self) -> Tuple[TowerCut, ...]:
        return tuple(self._cuts)

    def tower_by_key(self, stem: int, base_s: int) -> List[Tower]:
        return [tw for tw in self.towers() if tw.stem == stem and tw.base_s == base_s]

    def towers_in_stem(self, stem: int) -> List[Tower]:
        return [tw for tw in self.towers() if tw.stem == stem]

    # ------------------------------------------------------------- marks

    def add_permanent_marks(self, slot: Slot, vectors: Iterable[int], emit=True, receive=True):
        if emit:
            space = self._no_emit_perm.setdefault(slot, EchelonSpace())
            for v in vectors:
                space.add(v)
        if receive:
            space = self._no_receive_perm.setdefault(slot, EchelonSpace())
            for v in vectors:
                space.add(v)
        self._analysis = None

    # ----------------------------------------------------------- analysis

    def analysis(self):
        if self._analysis is None:
            from .rules import compute_analysis

            self._analysis = compute_analysis(self)
        return self._analysis

    # -------------------------------------------------------------- JSON

    def to_json(self) -> dict:
        def slot_key(slot):
            return "%d:%d" % slot

        marks_emit = {
            slot_key(slot): sorted(space.basis)
            for slot, space in sorted(self._no_emit_perm.items())
            if space.basis
        }
        marks_receive = {
            slot_key(slot): sorted(space.basis)
            for slot, space in sorted(self._no_receive_perm.items())
            if space.basis
        }
        return {
            "algebra": self.ext.algebra,
            "bounds": [self.s_max, self.t_max],
            "log": self.log,
            "records": {
                "%d:%d:%d" % key: list(rec["rows"])
                for key, rec in sorted(self._records.items())
            },
            "marks": {
                "no_emit": marks_emit,
                "no_receive": marks_receive,
                "no_emit_pages": sorted(
                    "%d:%d:%d" % key for key in self._no_emit_page
                ),
            },
            "splits": {
                slot_key(slot): count
                for slot, count in sorted(self._split_counts.items())
            },
            "towers": [tw.to_json() for tw in self.towers()],
            "cuts": [cut.to_json() for cut in self._cuts],
            "extension_asserts": list(self._ext_asserts),
        }


def replay_chart(ext: ExtChart, log: Sequence[dict]) -> AdamsChart:
    """Re-fire a log against a fresh chart; the result is bit-identical."""
    from .rules import (
        rule_margolis,
        rule_product_propagation,
        rule_rational,
        rule_tower_differential,
    )

    chart = AdamsChart(ext)
    for op in log:
        name = op["op"]
        if name == "record_differential":
            chart.record_differential(
                op["page"],
                tuple(op["source"]),
                op["rows"],
                author=op["author"],
                citation=op["citation"],
            )
        elif name == "assert":
            chart.assert_record(
                AssertionRecord(
                    kind=op["kind"],
                    payload=op["payload"],
                    author=op["author"],
                    citation=op["citation"],
                )
            )
        elif name == "rule_margolis":
            rule_margolis(chart, op["free_degrees"])
        elif name == "rule_rational":
            rule_rational(chart, {int(k): v for k, v in op["permitted"]})
        elif name == "rule_tower_differential":
            fact = op["fact"]
            rule_tower_differential(
                chart,
                AssertionRecord(
                    kind=fact["kind"],
                    payload=fact["payload"],
                    author=fact["author"],
                    citation=fact["citation"],
                ),
            )
        elif name == "rule_product_propagation":
            rule_product_propagation(chart)
        else:
            raise IllFormed("unknown log operation", op=name)
    return chart

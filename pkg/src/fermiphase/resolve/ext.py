"""Ext charts with their two degree-one-stage products.

Products are computed by lifting each chart class one stage along the
resolution. The class dual to a stage-s generator at internal degree t is
covered by the map onto a rank-one free module shifted to degree t. Composing
with the next boundary lands in the decomposables of that free module, so it
factors through the first stage of the unit resolution; the coefficient on
the dual stage-one generator is the product entry. The factorization always
exists because the boundary image carries no empty-word coefficients.
"""

from functools import lru_cache
from typing import Dict, List, Tuple

from ..errors import IllFormed
from ..f2homalg import (
    F2Matrix,
    FGModule,
    GradedF2Space,
    free_module,
    hom_from_free,
    make_algebra,
)
from .resolution import MinimalResolution, minimal_resolution

__all__ = ["ExtChart", "ext_chart", "PRODUCT_DEGREES"]

# chart products and their (stage, degree) shift: each has stage shift one
PRODUCT_DEGREES = {
    "A(1)": (("h0", 1), ("h1", 2)),
    "E(1)": (("h0", 1), ("v1", 3)),
}


@lru_cache(maxsize=None)
def _unit_stage_one(alg_name: str) -> MinimalResolution:
    alg = make_algebra(alg_name)
    unit = FGModule(alg, GradedF2Space({0: 1}, {0: ["u"]}), {})
    res = minimal_resolution(unit, 1, alg.top_degree + 1)
    expected = sorted(tau for _, tau in PRODUCT_DEGREES[alg_name])
    if res.stage_degrees(1) != expected:
        raise IllFormed(f"unexpected unit resolution over {alg_name}")
    return res


class ExtChart:
    def __init__(self, algebra_name, bounds, dims, products):
        self.algebra = algebra_name
        self.s_max, self.t_max = bounds
        self.dims: Dict[Tuple[int, int], int] = dims
        self.products: Dict[str, Dict[Tuple[int, int], F2Matrix]] = products
        self.product_degrees = dict(PRODUCT_DEGREES[algebra_name])

    @property
    def bounds(self) -> Tuple[int, int]:
        return (self.s_max, self.t_max)

    def dim(self, s: int, t: int) -> int:
        return self.dims.get((s, t), 0)

    @staticmethod
    def label(s: int, t: int, i: int) -> str:
        return f"{s}:{t}:{i}"

    def classes(self) -> List[Tuple[int, int, str]]:
        out = []
        for (s, t) in sorted(self.dims):
            for i in range(self.dims[s, t]):
                out.append((s, t, self.label(s, t, i)))
        return out

    def product_matrix(self, name: str, s: int, t: int) -> F2Matrix:
        tau = self.product_degrees[name]
        got = self.products[name].get((s, t))
        if got is not None:
            return got
        return F2Matrix(self.dim(s + 1, t + tau), self.dim(s, t))

    def verified(self, s: int, t: int) -> bool:
        # exactness one degree and one stage further in is required before a
        # class can be certified; everything on the boundary stays tentative
        return s < self.s_max and t < self.t_max

    def unverified_labels(self) -> List[str]:
        return [
            label for s, t, label in self.classes() if not self.verified(s, t)
        ]

    def to_json(self) -> Dict[str, object]:
        pairs: Dict[str, List[List[str]]] = {}
        for name in self.products:
            tau = self.product_degrees[name]
            acc = []
            for (s, t) in sorted(self.products[name]):
                mat = self.products[name][s, t]
                for j in range(mat.cols):
                    for i in range(mat.rows):
                        if mat.entry(i, j):
                            acc.append(
                                [self.label(s, t, j), self.label(s + 1, t + tau, i)]
                            )
            pairs[name] = acc
        return {
            "algebra": self.algebra,
            "bounds": [self.s_max, self.t_max],
            "classes": [
                {"s": s, "t": t, "label": label} for s, t, label in self.classes()
            ],
            "products": pairs,
            "unverified": self.unverified_labels(),
        }


def ext_chart(res: MinimalResolution) -> ExtChart:
    alg = res.algebra
    if alg.name not in PRODUCT_DEGREES:
        raise IllFormed(f"no product table for algebra {alg.name}")

    dims: Dict[Tuple[int, int], int] = {}
    for s in range(res.s_max + 1):
        for t, _ in res.stages[s]:
            dims[s, t] = dims.get((s, t), 0) + 1

    unit_res = _unit_stage_one(alg.name)
    d_unit = unit_res.maps[1]
    dual_pos = {}
    for name, tau in PRODUCT_DEGREES[alg.name]:
        gi = next(i for i, (d, _) in enumerate(unit_res.stages[1]) if d == tau)
        dual_pos[name] = unit_res.frees[1].free_order[tau].index(("", gi))

    products: Dict[str, Dict[Tuple[int, int], F2Matrix]] = {
        name: {} for name, _ in PRODUCT_DEGREES[alg.name]
    }
    for s in range(res.s_max):
        stage = res.stages[s]
        nxt_stage = res.stages[s + 1]
        nxt = res.maps[s + 1]
        nxt_free = res.frees[s + 1]
        for t in sorted({d for d, _ in stage}):
            cols = res.gens_at(s, t)
            mats = {
                name: F2Matrix(len(res.gens_at(s + 1, t + tau)), len(cols))
                for name, tau in PRODUCT_DEGREES[alg.name]
            }
            for cj, gidx in enumerate(cols):
                cover = free_module(alg, [(t, "u")])
                lift = hom_from_free(
                    res.frees[s],
                    cover,
                    [(d, 1 if i == gidx else 0) for i, (d, _) in enumerate(stage)],
                )
                for name, tau in PRODUCT_DEGREES[alg.name]:
                    u = t + tau
                    for ri, hidx in enumerate(res.gens_at(s + 1, u)):
                        pos = nxt_free.free_order[u].index(("", hidx))
                        image = nxt.mat(u).column(pos)
                        y = lift.mat(u).apply(image)
                        sol = d_unit.mat(tau).solve(y)
                        if sol is None:
                            raise IllFormed(
                                "boundary image failed to factor through the "
                                "unit resolution"
                            )
                        if (sol >> dual_pos[name]) & 1:
                            mats[name].data[ri] |= 1 << cj
            for name, _ in PRODUCT_DEGREES[alg.name]:
                if mats[name].rows and mats[name].cols:
                    products[name][s, t] = mats[name]

    return ExtChart(alg.name, res.bounds, dims, products)

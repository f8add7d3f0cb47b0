"""Minimal free resolutions over the two finite graded algebras.

The resolution is computed degree by degree up to a stage and internal-degree
bound. Stage generators are chosen greedily: at each degree, kernel elements
that are not already reachable by the algebra action on lower kernel degrees
become new generators. Because the kernel of a module map is closed under the
action, the decomposable part at degree t is exactly the span of g.K_{t-|g|}
over the algebra generators g, so the greedy choice is both minimal and exact
without ever solving a global system.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from ..errors import IllFormed, TruncationExceeded
from ..f2homalg import (
    EchelonSpace,
    FGModule,
    ModuleHom,
    free_module,
    hom_from_free,
    verify_module,
)

__all__ = ["MinimalResolution", "minimal_resolution"]


@dataclass
class MinimalResolution:
    """A bounded minimal free resolution.

    frees[s] is the stage-s free module, maps[0] the augmentation onto the
    resolved module, and maps[s] for s >= 1 the boundary into stage s-1.
    stages[s] lists (degree, label) for the stage-s generators in the order
    they index the free module.
    """

    module: FGModule
    s_max: int
    t_max: int
    frees: List[FGModule] = field(default_factory=list)
    maps: List[ModuleHom] = field(default_factory=list)
    stages: List[List[Tuple[int, str]]] = field(default_factory=list)

    @property
    def algebra(self):
        return self.module.algebra

    @property
    def bounds(self) -> Tuple[int, int]:
        return (self.s_max, self.t_max)

    def stage_degrees(self, s: int) -> List[int]:
        self._check_stage(s)
        return [d for d, _ in self.stages[s]]

    def gens_at(self, s: int, t: int) -> List[int]:
        """Indices into stages[s] of the generators sitting in degree t."""
        self._check_stage(s)
        return [i for i, (d, _) in enumerate(self.stages[s]) if d == t]

    def ext_dim(self, s: int, t: int) -> int:
        self._check_stage(s)
        if t > self.t_max:
            raise TruncationExceeded(
                f"degree {t} beyond the resolved window (t_max={self.t_max})"
            )
        return len(self.gens_at(s, t))

    def _check_stage(self, s: int) -> None:
        if not 0 <= s <= self.s_max:
            raise IllFormed(f"stage {s} outside the resolved range 0..{self.s_max}")


def minimal_resolution(m: FGModule, s_max: int, t_max: int) -> MinimalResolution:
    problems = verify_module(m)
    if problems:
        raise IllFormed(f"module violates its algebra relations: {problems[:3]}")
    alg = m.algebra
    top = alg.top_degree
    if m.truncation is not None and t_max > m.truncation - top:
        raise TruncationExceeded(
            f"t_max={t_max} needs module degrees up to {t_max + top}, "
            f"but the module is only known up to {m.truncation}"
        )
    if s_max < 0:
        raise IllFormed("s_max must be nonnegative")

    res = MinimalResolution(module=m, s_max=s_max, t_max=t_max)

    gens: List[Tuple[int, str]] = []
    images = []
    lo = m.min_degree()
    for t in range(lo, t_max + 1):
        n = m.dim(t)
        if n == 0:
            continue
        reach = EchelonSpace()
        for g in alg.generators:
            dg = alg.gen_degree(g)
            mat = m.act_gen(g, t - dg)
            for j in range(mat.cols):
                col = mat.column(j)
                if col:
                    reach.add(col)
        for j in range(n):
            v = 1 << j
            if not reach.contains(v):
                reach.add(v)
                gens.append((t, f"g{t}n{sum(1 for d, _ in gens if d == t)}"))
                images.append((t, v))
    p0 = free_module(alg, gens)
    res.frees.append(p0)
    res.stages.append(gens)
    res.maps.append(hom_from_free(p0, m, images))

    for s in range(1, s_max + 1):
        prev = res.frees[s - 1]
        bnd = res.maps[s - 1]
        kernels: Dict[int, List[int]] = {}
        for t in prev.degrees():
            if t > t_max:
                continue
            basis = bnd.mat(t).kernel_basis()
            if basis:
                kernels[t] = basis
        gens = []
        images = []
        for t in sorted(kernels):
            reach = EchelonSpace()
            for g in alg.generators:
                dg = alg.gen_degree(g)
                for v in kernels.get(t - dg, []):
                    w = prev.act_gen(g, t - dg).apply(v)
                    if w:
                        reach.add(w)
            for v in kernels[t]:
                if not reach.contains(v):
                    reach.add(v)
                    gens.append((t, f"g{t}n{sum(1 for d, _ in gens if d == t)}"))
                    images.append((t, v))
        ps = free_module(alg, gens)
        boundary = hom_from_free(ps, prev, images)
        _assert_minimal(prev, boundary)
        res.frees.append(ps)
        res.stages.append(gens)
        res.maps.append(boundary)

    return res


def _assert_minimal(prev: FGModule, boundary: ModuleHom) -> None:
    # no boundary image may involve a generator with the empty word
    for t, row in prev.free_order.items():
        mat = boundary.mat(t)
        for i, (word, _) in enumerate(row):
            if word == "" and mat.data[i]:
                raise IllFormed(f"boundary hits a stage generator at degree {t}")

"""Graded module layer: constructors, checker, restriction, serialization."""

import json

import pytest
from hypothesis import given, strategies as st

from fermiphase.errors import IllFormed, TruncationExceeded
from fermiphase.f2homalg import (
    F2Matrix,
    FGModule,
    GradedF2Space,
    direct_sum,
    free_module,
    hom_compose,
    hom_from_free,
    make_algebra,
    module_from_json,
    module_to_json,
    quotient,
    restrict_to_e1,
    submodule,
    suspension,
    verify_module,
)

SQ = make_algebra("A(1)")
EX = make_algebra("E(1)")


def dims_of(m):
    return {t: m.space.dims[t] for t in m.degrees()}


def test_free_module_dims():
    a = free_module(SQ, [(0, "x")])
    assert dims_of(a) == {0: 1, 1: 1, 2: 1, 3: 2, 4: 1, 5: 1, 6: 1}
    e = free_module(EX, [(0, "u")])
    assert dims_of(e) == {0: 1, 1: 1, 3: 1, 4: 1}


def test_free_module_verifies():
    assert verify_module(free_module(SQ, [(0, "x"), (2, "y")])) == []
    assert verify_module(free_module(EX, [(0, "u"), (1, "v")])) == []


def test_every_single_bit_corruption_is_caught():
    """Flipping any one action bit of a rank-1 free module breaks a relation."""
    for alg in (SQ, EX):
        a = free_module(alg, [(0, "x")])
        for g in alg.generators:
            dg = alg.gen_degree(g)
            for t in a.degrees():
                rows, cols = a.space.dim(t + dg), a.space.dim(t)
                if rows == 0:
                    continue
                base = a.action[g].get(t) or F2Matrix(rows, cols)
                for i in range(rows):
                    for j in range(cols):
                        data = list(base.data)
                        data[i] ^= 1 << j
                        act = {h: dict(a.action[h]) for h in alg.generators}
                        act[g][t] = F2Matrix(rows, cols, data)
                        bad = FGModule(alg, a.space, act)
                        report = verify_module(bad)
                        assert report, (alg.name, g, t, i, j)
                        assert {"relation", "degree", "basis"} <= set(report[0])


def test_restriction_is_the_free_rank_two_module():
    """A(1) over E(1) is free on generators in degrees 0 and 2."""
    r = restrict_to_e1(free_module(SQ, [(0, "x")]))
    assert verify_module(r) == []
    model = free_module(EX, [(0, "u"), (2, "v")])
    assert dims_of(model) == dims_of(r)
    # u -> x, v -> Sq2 x extends to a degreewise bijection
    f = hom_from_free(model, r, [(0, 1), (2, 1)])
    assert f.degree == 0
    assert f.is_module_map()
    for t in model.degrees():
        assert f.mat(t).rank() == model.space.dim(t)


def test_restriction_rejects_exterior_input():
    from fermiphase.errors import AlgebraMismatch

    with pytest.raises(AlgebraMismatch):
        restrict_to_e1(free_module(EX, [(0, "u")]))


def test_suspension_shifts_everything():
    m = free_module(EX, [(0, "u")])
    s = suspension(m, 3)
    assert dims_of(s) == {3: 1, 4: 1, 6: 1, 7: 1}
    assert s.labels(3) == ["u"]
    assert verify_module(s) == []
    assert dims_of(suspension(s, -3)) == dims_of(m)


def test_direct_sum_dims_and_labels():
    e = free_module(EX, [(0, "u")])
    s = direct_sum(e, suspension(e, 1))
    assert dims_of(s) == {0: 1, 1: 2, 2: 1, 3: 1, 4: 2, 5: 1}
    # the two copies of "0*u" in degree 1 pick up summand tags
    assert s.labels(1) == ["0*u#0", "u#1"] or len(set(s.labels(1))) == 2
    assert verify_module(s) == []


def test_left_ideal_and_quotient_of_sq_algebra():
    a = free_module(SQ, [(0, "x")])
    # the left ideal generated by Sq1·x
    sub, inc = submodule(a, [(1, a.act("1", 0, 1))])
    assert dims_of(sub) == {1: 1, 3: 1, 4: 1, 6: 1}
    assert inc.is_module_map()
    quo, pr = quotient(a, [(1, a.act("1", 0, 1))])
    assert dims_of(quo) == {0: 1, 2: 1, 3: 1, 5: 1}
    assert pr.is_module_map()
    assert verify_module(sub) == [] and verify_module(quo) == []


def test_joker_quotient():
    a = free_module(SQ, [(0, "x")])
    j, _ = quotient(a, [(3, a.act("12", 0, 1))])
    assert dims_of(j) == {0: 1, 1: 1, 2: 1, 3: 1, 4: 1}
    assert verify_module(j) == []


def test_truncation_guard():
    a = free_module(SQ, [(0, "x")], truncation=3)
    assert dims_of(a) == {0: 1, 1: 1, 2: 1, 3: 2}
    with pytest.raises(TruncationExceeded):
        a.dim(4)
    with pytest.raises(TruncationExceeded):
        a.act_gen("2", 2)
    assert verify_module(a) == []  # checks stop where data stops


def test_hom_compose():
    e = free_module(EX, [(0, "u")])
    by_q0 = hom_from_free(e, e, [(1, e.act("0", 0, 1))])
    by_q1 = hom_from_free(e, e, [(3, e.act("1", 0, 1))])
    square = hom_compose(by_q0, by_q0)
    assert square.degree == 2
    assert all(m.is_zero() for m in square.mats.values()) or not square.mats
    mixed = hom_compose(by_q1, by_q0)
    assert mixed.degree == 4
    assert mixed.mat(0).apply(1) == 1  # u -> Q1 Q0 u, the top class
    s1 = suspension(e, 1)
    with pytest.raises(IllFormed):
        hom_compose(by_q0, hom_from_free(s1, s1, [(1, 1)]))


def test_label_validation():
    with pytest.raises(IllFormed):
        GradedF2Space({0: 2}, {0: ["a"]})
    with pytest.raises(IllFormed):
        GradedF2Space({0: 2}, {0: ["a", "a"]})


@given(st.integers(-4, 4), st.integers(0, 2))
def test_json_roundtrip(shift, extra):
    gens = [(0, "x")] + [(1 + extra, f"g{i}") for i in range(extra)]
    m = suspension(free_module(SQ, gens, truncation=6 + extra), shift)
    doc = json.loads(json.dumps(module_to_json(m)))
    m2 = module_from_json(doc)
    assert module_to_json(m2) == module_to_json(m)
    assert verify_module(m2) == []

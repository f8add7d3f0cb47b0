"""Ext charts: class dimensions, products, the verified-region marking.

Product oracles, all frozen independently of the chart code:
  * exterior algebra: Ext is polynomial on (1,1) and (1,3), so every
    product map between neighbouring one-dimensional bidegrees is onto;
  * eight-dimensional algebra: the (1,1)-tower in stem zero is linked all
    the way up, the (1,2)-class cubes to zero, kills the (3,7)-class, and
    the (3,7)-class supports a (1,1)-multiplication into (4,8).
"""

from functools import lru_cache

from fermiphase.f2homalg import (
    FGModule,
    GradedF2Space,
    make_algebra,
    restrict_to_e1,
)
from fermiphase.resolve import ext_chart, minimal_resolution, named_module


def ground_field(alg_name):
    alg = make_algebra(alg_name)
    return FGModule(alg, GradedF2Space({0: 1}, {0: ["u"]}), {})


def e1_dim(s, t):
    if (t - s) % 2:
        return 0
    b = (t - s) // 2
    return 1 if 0 <= b <= s else 0


def ladder_dim(s, t):
    # infinite zigzag over the exterior algebra: one class per bidegree
    # with t - s = 2m, 0 <= s <= m
    if (t - s) % 2 or t < s:
        return 0
    return 1 if s <= (t - s) // 2 else 0


@lru_cache(maxsize=None)
def chart_of(key):
    builders = {
        "f2e1": lambda: (ground_field("E(1)"), 6, 16),
        "f2a1": lambda: (ground_field("A(1)"), 6, 20),
        "ladder": lambda: (named_module("H", truncation=18), 6, 14),
        "qbar_e1": lambda: (restrict_to_e1(named_module("Qbar")), 5, 12),
        "n1": lambda: (named_module("N1"), 6, 16),
    }
    m, s_max, t_max = builders[key]()
    return ext_chart(minimal_resolution(m, s_max, t_max))


def test_chart_json_shape():
    js = chart_of("f2e1").to_json()
    assert set(js) == {"algebra", "bounds", "classes", "products", "unverified"}
    assert js["algebra"] == "E(1)"
    assert js["bounds"] == [6, 16]
    assert set(js["products"]) == {"h0", "v1"}
    for entry in js["classes"]:
        assert set(entry) == {"s", "t", "label"}
        assert entry["label"] == "{s}:{t}".format(**entry) + ":" + entry["label"].rsplit(":", 1)[1]
    labels = {entry["label"] for entry in js["classes"]}
    for pairs in js["products"].values():
        for src, dst in pairs:
            assert src in labels and dst in labels


def test_a1_chart_uses_h1():
    js = chart_of("f2a1").to_json()
    assert set(js["products"]) == {"h0", "h1"}


def test_exterior_products_form_polynomial_ring():
    chart = chart_of("f2e1")
    assert chart.dim(2, 4) == 1
    assert chart.product_matrix("h0", 1, 3).entry(0, 0) == 1
    assert chart.product_matrix("v1", 1, 1).entry(0, 0) == 1
    # commutativity through (0,0) -> (2,4)
    a = chart.product_matrix("h0", 1, 3).mul(chart.product_matrix("v1", 0, 0))
    b = chart.product_matrix("v1", 1, 1).mul(chart.product_matrix("h0", 0, 0))
    assert a == b
    assert not a.is_zero()
    # every ladder step inside the verified region is an isomorphism
    for s in range(5):
        for t in range(15):
            if e1_dim(s, t) and e1_dim(s + 1, t + 1):
                assert chart.product_matrix("h0", s, t).entry(0, 0) == 1
            if e1_dim(s, t) and e1_dim(s + 1, t + 3):
                assert chart.product_matrix("v1", s, t).entry(0, 0) == 1


def test_a1_stem_zero_tower_is_linked():
    chart = chart_of("f2a1")
    for s in range(6):
        assert chart.dim(s, s) == 1
        assert chart.product_matrix("h0", s, s).entry(0, 0) == 1


def test_a1_h1_chain_and_truncation_of_powers():
    chart = chart_of("f2a1")
    assert chart.dim(1, 2) == 1
    assert chart.dim(2, 4) == 1
    assert chart.dim(3, 6) == 0  # cube of the (1,2)-class vanishes
    assert chart.product_matrix("h1", 0, 0).entry(0, 0) == 1
    assert chart.product_matrix("h1", 1, 2).entry(0, 0) == 1
    assert chart.dim(2, 3) == 0  # product of the two generators dies


def test_a1_higher_generators():
    chart = chart_of("f2a1")
    assert chart.dim(3, 7) == 1
    assert chart.dim(4, 8) == 1
    assert chart.product_matrix("h0", 3, 7).entry(0, 0) == 1
    assert chart.product_matrix("h1", 3, 7).is_zero()
    assert chart.dim(4, 12) == 1


def test_a1_products_commute():
    chart = chart_of("f2a1")
    for s in range(5):
        for t in range(18):
            hh = chart.product_matrix("h1", s + 1, t + 1).mul(
                chart.product_matrix("h0", s, t)
            )
            rev = chart.product_matrix("h0", s + 1, t + 2).mul(
                chart.product_matrix("h1", s, t)
            )
            assert hh == rev, (s, t)


def test_zigzag_ladder_chart():
    chart = chart_of("ladder")
    for s in range(7):
        for t in range(15):
            assert chart.dim(s, t) == ladder_dim(s, t), (s, t)
    # the vertical product is injective below the top of each column
    for m in range(1, 6):
        for s in range(m):
            t = s + 2 * m
            if t + 1 <= 14:
                assert chart.product_matrix("h0", s, t).entry(0, 0) == 1, (s, t)


def test_quotient_chart_is_shifted_ground_field():
    chart = chart_of("qbar_e1")
    base = chart_of("f2e1")
    for s in range(5):
        for t in range(12):
            assert chart.dim(s, t) == e1_dim(s + 1, t + 1), (s, t)
    for name, shift in (("h0", 1), ("v1", 3)):
        for s in range(4):
            for t in range(11):
                if chart.dim(s, t) and chart.dim(s + 1, t + shift):
                    assert chart.product_matrix(name, s, t) == base.product_matrix(
                        name, s + 1, t + 1
                    ), (name, s, t)


def test_unverified_marks_boundary_classes():
    chart = chart_of("f2e1")
    js = chart.to_json()
    flagged = set(js["unverified"])
    for entry in js["classes"]:
        on_edge = entry["s"] == 6 or entry["t"] == 16
        assert (entry["label"] in flagged) == on_edge, entry


def test_two_cell_module_products_all_nonzero():
    # every structurally possible product in the low window is realized;
    # a failure here is a flag to investigate, not a value to assume
    chart = chart_of("n1")
    shifts = {"h0": 1, "h1": 2}
    for name, shift in shifts.items():
        for s in range(5):
            for t in range(s, s + 7):
                if chart.dim(s, t) and chart.dim(s + 1, t + shift):
                    assert not chart.product_matrix(name, s, t).is_zero(), (
                        name,
                        s,
                        t,
                    )

"""Frozen facts about the two ground algebras.

The constructor already runs exhaustive unit/associativity checks; these
tests pin the numbers and a few handpicked products.
"""

import pytest

from fermiphase.f2homalg import make_algebra


def test_sq_algebra_shape():
    a = make_algebra("A(1)")
    assert a.dim == 8
    assert sorted(a.degree.values()) == [0, 1, 2, 3, 3, 4, 5, 6]
    assert a.top_degree == 6
    assert a.basis == ["", "1", "2", "12", "21", "121", "212", "1212"]


def test_exterior_algebra_shape():
    e = make_algebra("E(1)")
    assert e.dim == 4
    assert sorted(e.degree.values()) == [0, 1, 3, 4]
    assert e.basis == ["", "0", "1", "01"]


def test_handpicked_products():
    a = make_algebra("A(1)")
    assert a.multiply("1", "1") is None
    assert a.multiply("2", "2") == "121"
    assert a.multiply("2", "12") == "212"
    assert a.multiply("21", "21") == "1212"
    assert a.multiply("12", "12") == "1212"
    assert a.multiply("2", "21") is None  # 221 -> 1211 -> 0
    e = make_algebra("E(1)")
    assert e.multiply("1", "0") == "01"
    assert e.multiply("0", "1") == "01"
    assert e.multiply("0", "0") is None
    assert e.multiply("01", "0") is None


def test_unit_laws():
    for name in ("A(1)", "E(1)"):
        alg = make_algebra(name)
        for w in alg.basis:
            assert alg.multiply("", w) == w
            assert alg.multiply(w, "") == w


def test_shared_instances():
    assert make_algebra("A(1)") is make_algebra("A(1)")


def test_unknown_name_rejected():
    with pytest.raises(ValueError):
        make_algebra("A(2)")

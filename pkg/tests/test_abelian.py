import pytest
from hypothesis import given, strategies as st

from fermiphase.abelian import FinAbGroup, SymbolicTorsion
from fermiphase.errors import IllFormed


def test_cyclic_canonicalizes_to_prime_powers():
    assert FinAbGroup.cyclic(12).torsion == (4, 3)
    assert FinAbGroup.cyclic(360).torsion == (9, 8, 5)
    assert FinAbGroup.cyclic(1).is_trivial()


def test_composite_input_equals_primary_sum():
    assert FinAbGroup.cyclic(6) == FinAbGroup.cyclic(2) + FinAbGroup.cyclic(3)


def test_rejects_bad_orders():
    with pytest.raises(IllFormed):
        FinAbGroup(torsion=(1,))
    with pytest.raises(IllFormed):
        FinAbGroup(torsion=(0,))
    with pytest.raises(IllFormed):
        FinAbGroup.cyclic(0)
    with pytest.raises(IllFormed):
        FinAbGroup.free(-1)


def test_format_primary():
    assert FinAbGroup.trivial().format() == "0"
    assert FinAbGroup.free(1).format() == "Z"
    assert FinAbGroup.free(2).format() == "Z^2"
    g = FinAbGroup.free(1) + FinAbGroup.cyclic(8) + FinAbGroup.cyclic(3) + FinAbGroup.cyclic(2)
    assert g.format() == "Z + Z/8 + Z/3 + Z/2"


def test_format_merged_invariant_factors():
    g = FinAbGroup.cyclic(6) + FinAbGroup.cyclic(2)
    assert g.format() == "Z/3 + Z/2 + Z/2"
    assert g.format_merged() == "Z/6 + Z/2"
    h = FinAbGroup(torsion=(8, 4, 3, 2))
    assert h.format_merged() == "Z/24 + Z/4 + Z/2"


def test_order():
    assert FinAbGroup.cyclic(12).order() == 12
    assert (FinAbGroup.cyclic(4) + FinAbGroup.cyclic(4)).order() == 16
    assert FinAbGroup.free(1).order() is None
    assert FinAbGroup.trivial().order() == 1


def test_primary_split():
    g = FinAbGroup.cyclic(24) + FinAbGroup.free(2)
    assert g.odd_part() == FinAbGroup.cyclic(3)
    assert g.two_primary() == FinAbGroup.cyclic(8)
    assert g.free_rank == 2


def test_symbolic_formatting_and_evaluation():
    s = SymbolicTorsion(2, "r", offset=1, min_value=2)
    assert s.format() == "Z/2^{r+1}"
    assert SymbolicTorsion(2, "r", offset=-1, min_value=2).format() == "Z/2^{r-1}"
    assert SymbolicTorsion(2, "k").format() == "Z/2^{k}"
    g = FinAbGroup(parametric=(s,))
    assert g.evaluate(r=2) == FinAbGroup.cyclic(8)
    assert g.order() is None
    with pytest.raises(IllFormed):
        g.evaluate(r=1)
    # an exponent that could hit zero is rejected outright
    with pytest.raises(IllFormed):
        SymbolicTorsion(2, "r", offset=-1, min_value=1)


def test_symbolic_equality_is_strict():
    a = SymbolicTorsion(2, "r", offset=1, min_value=2)
    b = SymbolicTorsion(2, "r", offset=1, min_value=1)
    assert a != b
    assert FinAbGroup(parametric=(a,)) != FinAbGroup(parametric=(b,))


def test_json_round_trip():
    s = SymbolicTorsion(2, "r", offset=1, min_value=2)
    g = FinAbGroup(1, (8, 3), (s,))
    assert FinAbGroup.from_json(g.to_json()) == g


small_groups = st.builds(
    FinAbGroup,
    st.integers(min_value=0, max_value=3),
    st.lists(st.integers(min_value=2, max_value=64), max_size=4).map(tuple),
)


@given(small_groups, small_groups, small_groups)
def test_direct_sum_commutative_associative(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)


@given(small_groups)
def test_primary_decomposition_recovers_group(g):
    parts = FinAbGroup.free(g.free_rank)
    for p in {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61}:
        parts = parts + g.primary_part(p)
    assert parts == g


@given(small_groups)
def test_order_multiplicative(g):
    t = g.torsion_part()
    expect = 1
    for q in t.torsion:
        expect *= q
    assert t.order() == expect

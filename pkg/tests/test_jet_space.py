import pytest
import sympy as sp

from varseq.jet_space import (JetCoordinate, JetSpace, MultiIndex,
                              count_multiindices, enumerate_coordinates,
                              multiindices)


def test_multiindex_requires_sorted_entries():
    with pytest.raises(ValueError):
        MultiIndex((2, 1, 2))
    J = MultiIndex((1, 2, 2))
    assert len(J) == 3
    assert J.order == 3


def test_multiindex_append_and_drop():
    J = MultiIndex((1,))
    K = J.append(2)
    assert K.entries == (1, 2)
    dropped, i = K.drop_last()
    assert dropped.entries == (1,) and i == 2


def test_count_multiindices_matches_enumeration():
    for n in (1, 2, 3):
        for k in (0, 1, 2, 3):
            assert count_multiindices(n, k) == len(list(multiindices(n, k)))


def test_multiindices_nondecreasing_unique():
    out = list(multiindices(2, 3))
    assert len(set(out)) == len(out)
    for J in out:
        assert list(J.entries) == sorted(J.entries)


def test_symbol_naming_mechanics():
    space = JetSpace(("t",), ("q",))
    assert space.base_symbol(1) == sp.Symbol("t")
    assert space.fibre_symbol(1) == sp.Symbol("q")
    assert space.fibre_symbol(1, MultiIndex((1,))) == sp.Symbol("q_t")
    assert space.fibre_symbol(1, MultiIndex((1, 1))) == sp.Symbol("q_tt")


def test_symbol_naming_field_theory():
    space = JetSpace(("t", "x"), ("v", "w"))
    assert space.fibre_symbol(1, MultiIndex((1, 2))) == sp.Symbol("v_tx")
    assert space.fibre_symbol(2, MultiIndex((2, 2))) == sp.Symbol("w_xx")


def test_coordinate_of_round_trip():
    space = JetSpace(("t", "x"), ("v", "w"))
    for coord in enumerate_coordinates(space, 3):
        assert space.coordinate_of(space.symbol(coord)) == coord


def test_coordinate_of_rejects_unknown():
    space = JetSpace(("t",), ("q",))
    assert space.coordinate_of(sp.Symbol("z")) is None
    assert space.coordinate_of(sp.Symbol("q_x")) is None


def test_coordinate_of_ambiguous_names():
    # fibre name containing the base letter still parses correctly
    space = JetSpace(("t",), ("qt",))
    c = space.coordinate_of(sp.Symbol("qt_t"))
    assert c == JetCoordinate("fibre", 1, MultiIndex((1,)))


def test_jet_order():
    space = JetSpace(("t",), ("q",))
    q, qt, qtt = sp.symbols("q q_t q_tt")
    assert space.jet_order(q) == 0
    assert space.jet_order(q * qt) == 1
    assert space.jet_order(qtt + sp.Symbol("m")) == 2
    assert space.jet_order(sp.Integer(5)) == 0


def test_enumerate_coordinates_count():
    space = JetSpace(("t", "x"), ("v",))
    coords = enumerate_coordinates(space, 2)
    # 2 base + 1 fibre * (1 + 2 + 3) multi-indices of order <= 2
    assert len(coords) == 2 + 6


def test_empty_fibre_rejected():
    with pytest.raises(ValueError):
        JetSpace(("t",), ())

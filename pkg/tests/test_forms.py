import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from varseq import forms as fm
from varseq import symexpr
from varseq.forms import Dx, Dy, Form, Omega
from varseq.jet_space import JetSpace, MultiIndex

from conftest import random_polynomial


J1 = MultiIndex((1,))
J2 = MultiIndex((1, 1))


def random_form(space, degree, order, rng, contact=None):
    """A random form with polynomial coefficients on J^order."""
    from varseq.jet_space import multiindices
    atoms = [Dx(i) for i in range(1, space.n + 1)]
    max_J = max(order - 1, 0)
    for sigma in range(1, space.m + 1):
        for k in range(max_J + 1):
            for J in multiindices(space.n, k):
                atoms.append(Omega(sigma, J))
    out = fm.zero(space, degree, order)
    for _ in range(3):
        if contact is None:
            chosen = rng.sample(atoms, degree)
        else:
            cons = [a for a in atoms if isinstance(a, Omega)]
            dxs = [a for a in atoms if isinstance(a, Dx)]
            if contact > len(cons) or degree - contact > len(dxs):
                continue
            chosen = rng.sample(cons, contact) + rng.sample(dxs,
                                                            degree - contact)
        coeff = random_polynomial(space, order, rng)
        out = out + Form(space, degree, {tuple(chosen): coeff}, order=order)
    return out


def test_wedge_antisymmetry(mech2):
    w1 = fm.omega(mech2, 1)
    w2 = fm.omega(mech2, 2)
    assert (fm.wedge(w1, w2) + fm.wedge(w2, w1)).is_zero()
    assert fm.wedge(w1, w1).is_zero()


def test_wedge_sign_with_sorting(field2):
    dt, dx = fm.dx(field2, 1), fm.dx(field2, 2)
    a = fm.wedge(dx, dt)
    assert a.coefficient((Dx(1), Dx(2))) == -1


def test_contact_structure_equation(mech):
    # d omega^q_J = - omega^q_{Jt} ^ dt in mechanics
    for J in (MultiIndex(), J1):
        w = fm.omega(mech, 1, J)
        dw = fm.exterior_d(w)
        expected = fm.wedge(fm.dx(mech, 1), fm.omega(mech, 1, J.append(1)))
        assert dw.equals(expected) is True


def test_exterior_d_of_coordinate_function(mech):
    q = sp.Symbol("q")
    f = fm.scalar_form(mech, q, order=1)
    df = fm.exterior_d(f)
    # dq = omega^q + q_t dt
    assert df.coefficient((Omega(1, MultiIndex()),)) == 1
    assert df.coefficient((Dx(1),)) == sp.Symbol("q_t")


def test_d_squared_zero_polynomial():
    space = JetSpace(("t", "x"), ("v",))
    rng = random.Random(7)
    for _ in range(5):
        rho = random_form(space, 1, 1, rng)
        dd = fm.exterior_d(fm.exterior_d(rho))
        assert dd.is_zero()


def test_d_squared_zero_opaque(mech):
    t, q, qt = sp.Symbol("t"), sp.Symbol("q"), sp.Symbol("q_t")
    L = symexpr.opaque("L", t, q, qt)
    rho = L * fm.wedge(fm.omega(mech, 1), fm.dx(mech, 1))
    assert fm.exterior_d(fm.exterior_d(rho)).is_zero()


def test_ingest_coordinate_basis(mech):
    # dy^q = omega^q + q_t dt
    rho = fm.ingest_coordinate_basis(mech, [(sp.Integer(1), (Dy(1),))], 0)
    assert rho.coefficient((Omega(1, MultiIndex()),)) == 1
    assert rho.coefficient((Dx(1),)) == sp.Symbol("q_t")


def test_contact_components_partition(field2):
    rng = random.Random(3)
    rho = random_form(field2, 2, 1, rng)
    total = fm.zero(field2, 2, rho.order)
    for k in range(3):
        total = total + fm.contact_component(rho, k)
    assert total.equals(rho) is True


def test_horizontalize_kills_contact(mech):
    rho = fm.wedge(fm.omega(mech, 1), fm.dx(mech, 1))
    assert fm.horizontalize(rho).is_zero()
    lam = sp.Symbol("q_t") * fm.dx(mech, 1)
    assert fm.horizontalize(lam).equals(lam) is True


def test_dH_dV_decompose_d_on_horizontal(field2):
    # on a horizontal form, d = d_H + d_V
    rng = random.Random(11)
    rho = random_form(field2, 1, 1, rng, contact=0)
    d = fm.exterior_d(rho)
    split = fm.d_H(rho) + fm.d_V(rho)
    assert d.equals(split) is True


def test_dH_squared_zero(field2):
    rng = random.Random(13)
    rho = random_form(field2, 1, 1, rng)
    assert fm.d_H(fm.d_H(rho)).is_zero()


def test_dH_of_function_is_total_derivative(field2):
    f = random_polynomial(field2, 1, random.Random(5))
    df = fm.d_H(fm.scalar_form(field2, f, order=1))
    for i in (1, 2):
        expected = symexpr.total_derivative(field2, f, i)
        assert sp.expand(df.coefficient((Dx(i),)) - expected) == 0


def test_contraction_dual_bases(field2):
    w = fm.omega(field2, 1, J1)
    v = fm.unit_vertical(field2, 1, J1)
    assert fm.contract(v, w).coefficient(()) == 1
    assert fm.contract(v, fm.omega(field2, 2, J1)).is_zero()
    assert fm.contract(v, fm.dx(field2, 1)).is_zero()
    d1 = fm.total_field(field2, 1)
    assert fm.contract(d1, fm.dx(field2, 1)).coefficient(()) == 1
    assert fm.contract(d1, w).is_zero()


def test_contraction_antiderivation_sign(mech2):
    w1, w2 = fm.omega(mech2, 1), fm.omega(mech2, 2)
    v1 = fm.unit_vertical(mech2, 1)
    rho = fm.wedge(w2, w1)
    # i_v1 (w2 ^ w1) = - w2
    assert fm.contract(v1, rho).equals((-1) * w2) is True


def test_is_strongly_contact(mech):
    dt = fm.dx(mech, 1)
    w = fm.omega(mech, 1)
    wt = fm.omega(mech, 1, J1)
    assert fm.is_strongly_contact(fm.wedge(w, wt))
    assert not fm.is_strongly_contact(fm.wedge(w, dt))


def test_form_json_round_trip(field2):
    rng = random.Random(17)
    rho = random_form(field2, 2, 2, rng)
    node = fm.form_to_json(rho)
    back = fm.form_from_json(field2, node)
    assert back.equals(rho) is True
    assert fm.form_to_json(back) == node


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_wedge_associative_random(seed):
    space = JetSpace(("t", "x"), ("v",))
    rng = random.Random(seed)
    a = random_form(space, 1, 1, rng)
    b = random_form(space, 1, 1, rng)
    c = random_form(space, 1, 1, rng)
    left = fm.wedge(fm.wedge(a, b), c)
    right = fm.wedge(a, fm.wedge(b, c))
    assert left.equals(right) is True


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_leibniz_rule_random(seed):
    space = JetSpace(("t",), ("q",))
    rng = random.Random(seed)
    a = random_form(space, 1, 1, rng)
    b = random_form(space, 1, 1, rng)
    lhs = fm.exterior_d(fm.wedge(a, b))
    rhs = fm.wedge(fm.exterior_d(a), fm.lift(b, b.order + 1)) \
        - fm.wedge(fm.lift(a, a.order + 1), fm.exterior_d(b))
    assert lhs.equals(rhs) is True


def test_degree_and_order_validation(mech):
    with pytest.raises(ValueError):
        Form(mech, 1, {(Dx(1), Dx(1)): sp.Integer(1)})
    with pytest.raises(ValueError):
        Form(mech, 1, {(Dx(1),): sp.Symbol("q_t")}, order=0)

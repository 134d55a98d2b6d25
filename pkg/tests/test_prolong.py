import pytest
import sympy as sp

from varseq import forms as fm
from varseq import prolong as pr
from varseq import symexpr, variational as vr
from varseq.jet_space import JetSpace, MultiIndex

J1 = MultiIndex((1,))
J2 = MultiIndex((1, 1))


@pytest.fixture
def free_particle(mech):
    qt = sp.Symbol("q_t")
    return qt**2 / 2 * fm.dx(mech, 1)


def test_prolong_vertical_shift(mech):
    X = pr.ProjectableVectorField(mech, {}, {1: sp.Integer(1)})
    Z = pr.prolong(X, 2)
    assert Z.component(1, MultiIndex()) == 1
    assert Z.component(1, J1) == 0
    assert Z.component(1, J2) == 0


def test_prolong_scaling_field(mech):
    q, qt, qtt = sp.symbols("q q_t q_tt")
    X = pr.ProjectableVectorField(mech, {}, {1: q})
    Z = pr.prolong(X, 2)
    assert Z.component(1, MultiIndex()) == q
    assert Z.component(1, J1) == qt
    assert Z.component(1, J2) == qtt


def test_prolong_time_translation_split(mech):
    qt, qtt = sp.symbols("q_t q_tt")
    X = pr.ProjectableVectorField(mech, {1: sp.Integer(1)}, {})
    Z = pr.prolong(X, 2)
    assert Z.component(1, J1) == 0
    ZH, ZV = pr.split_HV(Z)
    assert ZH.base[1] == 1
    assert ZV.vertical[(1, MultiIndex())] == -qt
    assert ZV.vertical[(1, J1)] == -qtt


def test_prolong_classical_formula_field_theory(field2):
    # oracle: first prolongation components d_i Xi - y_j dxi/dx_i
    t, x = field2.base_symbol(1), field2.base_symbol(2)
    v = field2.fibre_symbol(1)
    xi1, Xi1 = t * x, v**2
    X = pr.ProjectableVectorField(field2, {1: xi1}, {1: Xi1, 2: v})
    Z = pr.prolong(X, 1)
    for i, Ji in ((1, J1), (2, MultiIndex((2,)))):
        vi = field2.fibre_symbol(1, Ji)
        expected = symexpr.total_derivative(field2, Xi1, i) \
            - field2.fibre_symbol(1, J1) * sp.diff(xi1, (t, x)[i - 1])
        assert sp.expand(Z.component(1, Ji) - expected) == 0


def test_lie_derivative_of_symmetry_vanishes(mech, free_particle):
    X = pr.ProjectableVectorField(mech, {}, {1: sp.Integer(1)})
    assert pr.lie_derivative(X, free_particle).is_zero()


def test_lie_derivative_scaling_on_contact_form(mech):
    q = sp.Symbol("q")
    X = pr.ProjectableVectorField(mech, {}, {1: q})
    w = fm.omega(mech, 1)
    Lw = pr.lie_derivative(X, w)
    assert Lw.equals(fm.lift(w, Lw.order)) is True


def test_noether_energy_current(mech, free_particle):
    qt = sp.Symbol("q_t")
    theta = vr.cartan_form(free_particle)
    X = pr.ProjectableVectorField(mech, {1: sp.Integer(1)}, {})
    current, _ = pr.noether_current(theta, X)
    assert current.coefficient(()) == -qt**2 / 2


def test_noether_rejects_non_lepage(mech, free_particle):
    X = pr.ProjectableVectorField(mech, {1: sp.Integer(1)}, {})
    with pytest.raises(ValueError):
        pr.noether_current(free_particle, X)


def test_first_variation_split_sums_to_lie_derivative(mech, free_particle):
    q = sp.Symbol("q")
    X = pr.ProjectableVectorField(mech, {}, {1: q})
    el, boundary, current = pr.first_variation_split(free_particle, X)
    total = el + boundary
    L = pr.lie_derivative(X, free_particle)
    assert fm.horizontalize(L).equals(total) is True
    assert fm.d_H(current).equals(boundary) is True


def test_symmetry_check(mech, free_particle):
    shift = pr.ProjectableVectorField(mech, {}, {1: sp.Integer(1)})
    scale = pr.ProjectableVectorField(mech, {}, {1: sp.Symbol("q")})
    eps = vr.euler_lagrange(free_particle).form
    assert pr.symmetry_check(shift, eps) is True
    assert pr.symmetry_check(scale, eps) is False


def test_krbek_identity_vertical(mech):
    t, q, qt, qtt = sp.symbols("t q q_t q_tt")
    A = symexpr.opaque("A", t, q, qt)
    rho = A * fm.wedge(fm.omega(mech, 1), fm.dx(mech, 1))
    X = pr.ProjectableVectorField(mech, {}, {1: q**2})
    res = pr.krbek_identity_check(X, rho, 1)
    assert fm.horizontalize(res).equals(
        fm.horizontalize(pr.lie_derivative(X, rho))) is True


def test_higher_lie_identity(mech):
    t, q, qt, qtt = sp.symbols("t q q_t q_tt")
    A = symexpr.opaque("A", t, q, qt, qtt)
    rho = A * fm.wedge(fm.omega(mech, 1), fm.dx(mech, 1))
    X = pr.ProjectableVectorField(mech, {}, {1: q})
    res = pr.higher_lie_identity_check(X, rho)
    assert res.is_zero()


def test_nbh_current_free_particle(mech, free_particle):
    qt, qtt = sp.symbols("q_t q_tt")
    eps = vr.euler_lagrange(free_particle).form
    X = pr.ProjectableVectorField(mech, {}, {1: sp.Integer(1)})
    current, multiples = pr.nbh_current(X, eps)
    assert current.coefficient(()) == qt
    assert multiples[1] == -1


def test_nbh_rejects_non_variational(mech):
    qt, qtt = sp.symbols("q_t q_tt")
    eps = (qtt + qt) * fm.wedge(fm.omega(mech, 1), fm.dx(mech, 1))
    X = pr.ProjectableVectorField(mech, {}, {1: sp.Integer(1)})
    with pytest.raises(ValueError):
        pr.nbh_current(X, eps)


def test_generalized_field_requires_flag(mech):
    qt = sp.Symbol("q_t")
    with pytest.raises(ValueError):
        pr.ProjectableVectorField(mech, {}, {1: qt})
    X = pr.ProjectableVectorField(mech, {}, {1: qt}, generalized=True)
    assert pr.prolong(X, 1).component(1, J1) == sp.Symbol("q_tt")

"""Representation machinery of the variational sequence.

Implements the interior Euler operator I, the residual operator R with
the defining identity p_k rho = I(rho) + p_k d R(rho), the
Euler-Lagrange and Helmholtz morphisms, Cartan forms and Lepage
equivalents in every degree, the fibre-scaling contact homotopy
operator A (Tonti Lagrangians), and triviality/variationality checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import sympy as sp

from .jet_space import JetSpace, MultiIndex, multiindices
from . import forms as fm
from . import symexpr
from .forms import Form, Omega, Dx

__all__ = [
    "SourceForm",
    "interior_euler",
    "residual",
    "euler_lagrange",
    "helmholtz",
    "reduced_helmholtz_mechanics",
    "cartan_form",
    "is_lepage",
    "lepage_equivalent",
    "contact_homotopy",
    "is_variationally_trivial",
    "source_canonicalize",
    "class_representative",
    "classes_equal",
    "NonPolynomialError",
]


class NonPolynomialError(ValueError):
    """Raised when an exact operation needs polynomial fibre dependence."""


@dataclass(frozen=True)
class SourceForm:
    """An omega^sigma-generated k-contact (n+k)-form."""

    form: Form
    k: int
    canonical: bool = False

    @property
    def space(self) -> JetSpace:
        return self.form.space

    def is_zero(self) -> bool:
        return self.form.is_zero()

    def __repr__(self) -> str:
        return "SourceForm<k=%d, %r>" % (self.k, self.form)


def _check_source_degree(rho: Form) -> int:
    k = rho.degree - rho.space.n
    if k < 1:
        raise ValueError("degree must exceed the base dimension")
    return k


def _factor_omega0(mu: Form) -> Form:
    """Write a k-contact (n+k)-form as F ^ omega0 and return F.

    Every term of such a form carries the full set of dx atoms, so F is
    the purely contact wedge with a sign from moving omega0 across it.
    """
    space = mu.space
    n = space.n
    terms = {}
    for atoms, coeff in mu.terms.items():
        dx_atoms = tuple(a for a in atoms if isinstance(a, Dx))
        w_atoms = tuple(a for a in atoms if isinstance(a, Omega))
        if len(dx_atoms) != n:
            raise ValueError("term does not carry the full volume factor")
        sign = (-1) ** (len(w_atoms) * n)
        terms[w_atoms] = sign * coeff
    return Form(space, mu.degree - n, terms, order=mu.order, _checked=True)


def _wedge_omega0(F: Form) -> Form:
    return fm.wedge(F, fm.omega0(F.space))


def _td_contact_form(G: Form, i: int) -> Form:
    """The total derivative L_{d_i} of a purely contact wedge.

    Acts as d_i on coefficients and bumps each omega^nu_K to
    omega^nu_{Ki}; an even derivation, so no Koszul signs beyond the
    canonical re-sorting.
    """
    space = G.space
    terms: dict = {}

    def emit(atoms, coeff):
        srt = fm._sort_atoms(atoms)
        if srt is None:
            return
        sorted_atoms, sign = srt
        terms[sorted_atoms] = terms.get(sorted_atoms, 0) + sign * coeff

    for atoms, coeff in G.terms.items():
        di = symexpr.total_derivative(space, coeff, i)
        if di != 0:
            emit(atoms, di)
        for p, a in enumerate(atoms):
            bumped = atoms[:p] + (Omega(a.sigma, a.J.append(i)),) + atoms[p + 1:]
            emit(bumped, coeff)
    return Form(space, G.degree, terms, order=G.order + 1, _checked=True)


def _td_contact_form_multi(G: Form, J: MultiIndex) -> Form:
    for i in J.entries:
        G = _td_contact_form(G, i)
    return G


def _slot_decomposition(F: Form, k: int):
    """Yield (sigma, J, eta_hat) with F = sum omega^sigma_J ^ eta_hat.

    eta_hat^J_sigma = (1/k) (d/dy^sigma_J hook F), the Euler-identity
    decomposition of a k-contact wedge.
    """
    space = F.space
    slots = sorted({(a.sigma, a.J) for atoms in F.terms for a in atoms})
    for sigma, J in slots:
        eta = fm.contract(fm.unit_vertical(space, sigma, J), F) * sp.Rational(1, k)
        if eta.terms:
            yield sigma, J, eta


def interior_euler(rho: Form) -> SourceForm:
    """The interior Euler operator I.

    I(rho) = (1/k) omega^sigma ^ sum_J (-1)^|J| d_J (d/dy^sigma_J hook
    p_k rho), with d_J acting as the iterated total-derivative Lie
    derivative on contact wedges.
    """
    k = _check_source_degree(rho)
    space = rho.space
    mu = fm.contact_component(rho, k)
    result = fm.zero(space, rho.degree)
    if not mu.terms:
        return SourceForm(result, k, canonical=True)
    F = _factor_omega0(mu)
    per_sigma: dict[int, Form] = {}
    for sigma, J, eta in _slot_decomposition(F, k):
        piece = ((-1) ** len(J)) * _td_contact_form_multi(eta, J)
        per_sigma[sigma] = piece if sigma not in per_sigma \
            else per_sigma[sigma] + piece
    for sigma, total in per_sigma.items():
        result = result + _wedge_omega0(fm.wedge(fm.omega(space, sigma), total))
    return SourceForm(result, k, canonical=True)


def residual(rho: Form) -> Form:
    """The residual operator R: a k-contact (n+k-1)-form with
    p_k rho = I(rho) + p_k d R(rho), verified internally.

    Constructive integration by parts: for each slot omega^sigma_J with
    |J| >= 1 in the Euler-identity decomposition of p_k rho, repeatedly
    strip the last index i of J via

        omega^sigma_{Ki} ^ eta = L_{d_i}(omega^sigma_K ^ eta)
                                 - omega^sigma_K ^ L_{d_i} eta,

    accumulating (-1)^k (omega^sigma_K ^ eta) ^ omega_i into the
    boundary current at every step.
    """
    k = _check_source_degree(rho)
    space = rho.space
    mu = fm.contact_component(rho, k)
    R = fm.zero(space, rho.degree - 1)
    if not mu.terms:
        return R
    F = _factor_omega0(mu)
    sign_k = (-1) ** k
    for sigma, J, eta in _slot_decomposition(F, k):
        while len(J):
            K, i = J.drop_last()
            X = fm.wedge(fm.omega(space, sigma, K), eta)
            R = R + sign_k * fm.wedge(X, fm.omega_i(space, i))
            eta = -1 * _td_contact_form(eta, i)
            J = K
    _verify_residual(mu, R, k)
    return R


def _verify_residual(mu: Form, R: Form, k: int) -> None:
    lhs = mu - interior_euler(mu).form
    rhs = fm.contact_component(fm.exterior_d(R), k)
    if (lhs - rhs).equals(fm.zero(mu.space, mu.degree)) is not True:
        raise AssertionError("residual defining identity failed "
                             "(internal error)")


def euler_lagrange(lam: Form) -> SourceForm:
    """The Euler-Lagrange morphism E_n(lambda) = I(d lambda)."""
    if lam.degree != lam.space.n:
        raise ValueError("Lagrangian must be an n-form")
    if not fm.contact_component(lam, 0).equals(lam):
        raise ValueError("Lagrangian must be horizontal")
    return interior_euler(fm.exterior_d(lam))


def helmholtz(eps: SourceForm | Form) -> SourceForm:
    """The Helmholtz morphism H_eps = I(d eps) for a dynamical form."""
    form = eps.form if isinstance(eps, SourceForm) else eps
    if form.degree - form.space.n != 1:
        raise ValueError("helmholtz requires a dynamical form (k = 1)")
    return interior_euler(fm.exterior_d(form))


def cartan_form(rho: Form, k: Optional[int] = None) -> Form:
    """The Cartan form theta = p_k rho - p_{k+1} R(d p_k rho)."""
    space = rho.space
    if k is None:
        k = rho.degree - space.n
    if k < 0:
        raise ValueError("contact degree must be >= 0")
    mu = fm.contact_component(rho, k)
    d_mu = fm.exterior_d(mu)
    if fm.contact_component(d_mu, k + 1).is_zero():
        return mu
    R = residual(d_mu)
    return mu - fm.contact_component(R, k + 1)


def is_lepage(rho: Form) -> Optional[bool]:
    """p_{k+1} d rho = I(d rho) with k = degree - n.

    Exact verdict for rational-closed coefficients; None means unknown
    (caller falls back to the probe module).
    """
    k = rho.degree - rho.space.n
    if k < 0:
        raise ValueError("Lepage property needs degree >= n")
    d_rho = fm.exterior_d(rho)
    lhs = fm.contact_component(d_rho, k + 1)
    rhs = interior_euler(d_rho).form
    return lhs.equals(rhs)


def lepage_equivalent(sigma: SourceForm | Form) -> Form:
    """The distinguished Lepage equivalent theta_sigma (nu = mu = 0)."""
    form = sigma.form if isinstance(sigma, SourceForm) else sigma
    return cartan_form(form)


def _fibre_scale_integral(space: JetSpace, coeff: sp.Expr, kc: int) -> sp.Expr:
    """int_0^1 u^{kc-1} c(u.[y]) du for polynomial fibre dependence."""
    u = sp.Dummy("u")
    subs = {}
    for s in coeff.free_symbols:
        coord = space.coordinate_of(s)
        if coord is not None and coord.kind == "fibre":
            subs[s] = u * s
    scaled = sp.expand(coeff.xreplace(subs))
    try:
        poly = sp.Poly(scaled, u)
    except sp.PolynomialError as exc:
        raise NonPolynomialError(
            "contact homotopy needs polynomial fibre dependence") from exc
    out = sp.Integer(0)
    for (p,), c in poly.terms():
        out += c * sp.Rational(1, kc + p)
    return out


def contact_homotopy(rho: Form) -> Form:
    """The contact homotopy operator A (fibre-scaling homotopy).

    Hooks the radial vertical field sum y^sigma_J d/dy^sigma_J into each
    at-least-1-contact term, scales the fibre coordinates by u, and
    integrates exactly over u in [0, 1]; horizontal terms map to 0.
    The homotopy identity lift(rho) = A(d rho) + d(A rho) holds exactly
    for forms with no purely base-dependent horizontal part.
    """
    space = rho.space
    terms: dict = {}
    for atoms, coeff in rho.terms.items():
        kc = rho.contact_count(atoms)
        if kc == 0:
            continue
        for s in coeff.free_symbols:
            coord = space.coordinate_of(s)
            if coord is not None and coord.kind == "fibre":
                if not coeff.is_polynomial(s):
                    raise NonPolynomialError(
                        "contact homotopy needs polynomial fibre dependence")
        weight = _fibre_scale_integral(space, coeff, kc)
        for p, a in enumerate(atoms):
            if not isinstance(a, Omega):
                continue
            hooked = space.fibre_symbol(a.sigma, a.J)
            rest = atoms[:p] + atoms[p + 1:]
            terms[rest] = terms.get(rest, 0) + ((-1) ** p) * hooked * weight
    return Form(space, rho.degree - 1, terms, order=rho.order, _checked=True)


def base_restriction(rho: Form) -> Form:
    """chi_0^* rho: fibre coordinates to 0, contact atoms to 0."""
    space = rho.space
    terms = {}
    for atoms, coeff in rho.terms.items():
        if rho.contact_count(atoms) != 0:
            continue
        subs = {s: 0 for s in coeff.free_symbols
                if (c := space.coordinate_of(s)) is not None
                and c.kind == "fibre"}
        coeff0 = coeff.xreplace(subs)
        if coeff0 != 0:
            terms[atoms] = coeff0
    return Form(space, rho.degree, terms, order=rho.order, _checked=True)


def class_representative(rho: Form) -> Form:
    """R_q: h(rho) for degree q <= n, I(rho) for q > n, identity for q = 0."""
    q = rho.degree
    if q == 0:
        return rho
    if q <= rho.space.n:
        return fm.horizontalize(rho)
    return interior_euler(rho).form


def classes_equal(a: Form, b: Form) -> Optional[bool]:
    return class_representative(a - b).equals(fm.zero(a.space, a.degree))


def is_variationally_trivial(sigma: SourceForm | Form,
                             with_primitive: bool = True):
    """Triviality of the class of a Lagrangian or canonical source form.

    Returns (flag, primitive-or-None).  For source forms the primitive
    is the contact homotopy A(sigma) (a Tonti-style potential); for
    Lagrangians it is the horizontal part of A applied to the Cartan
    form, with d_H(primitive) = lambda verified.
    """
    space = sigma.space if isinstance(sigma, SourceForm) else sigma.space
    form = sigma.form if isinstance(sigma, SourceForm) else sigma
    n = space.n
    if form.degree == n:
        lam = fm.horizontalize(form)
        trivial = euler_lagrange(lam).is_zero()
        if not trivial or not with_primitive:
            return trivial, None
        theta = cartan_form(lam)
        primitive = fm.horizontalize(contact_homotopy(theta))
        if fm.d_H(primitive).equals(lam) is not True:
            primitive = _horizontal_primitive(lam)
        return True, primitive
    trivial = interior_euler(fm.exterior_d(form)).is_zero()
    if not trivial or not with_primitive:
        return trivial, None
    primitive = contact_homotopy(form)
    check = interior_euler(fm.exterior_d(primitive)).form
    if check.equals(interior_euler(form).form) is not True:
        raise AssertionError("primitive verification failed (internal error)")
    return True, primitive


def _monomial_basis(space: JetSpace, order: int, degree: int,
                    extra_symbols=()) -> list[sp.Expr]:
    symbols = [space.base_symbol(i) for i in range(1, space.n + 1)]
    for k in range(order + 1):
        for sigma in range(1, space.m + 1):
            for J in multiindices(space.n, k):
                symbols.append(space.fibre_symbol(sigma, J))
    symbols.extend(extra_symbols)
    basis = [sp.Integer(1)]
    import itertools
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(symbols, d):
            basis.append(sp.Mul(*combo))
    return basis


def _horizontal_primitive(lam: Form) -> Form:
    """Solve d_H eta = lambda for a horizontal (n-1)-form by ansatz.

    Only used for trivial Lagrangians with polynomial coefficients.
    """
    space = lam.space
    order = lam.order
    degree = 1 + max([sp.total_degree(c) if c.free_symbols else 0
                      for c in lam.terms.values()] or [0])
    params = sorted({s for c in lam.terms.values()
                     for s in c.free_symbols
                     if space.coordinate_of(s) is None},
                    key=sp.default_sort_key)
    basis = _monomial_basis(space, order, degree, params)
    unknowns = []
    eta = fm.zero(space, space.n - 1, order)
    for i in range(1, space.n + 1):
        coeff = sp.Integer(0)
        for mono in basis:
            a = sp.Dummy("a")
            unknowns.append(a)
            coeff += a * mono
        eta = eta + fm.wedge(fm.scalar_form(space, coeff, order=order),
                             fm.omega_i(space, i))
    diff = fm.d_H(eta) - fm.lift(lam, order + 1)
    eqs = []
    gens = set()
    for c in diff.terms.values():
        poly_gens = [s for s in c.free_symbols if s not in unknowns]
        gens.update(poly_gens)
        eqs.append(c)
    system = []
    for c in eqs:
        poly = sp.Poly(c, *sorted(gens, key=sp.default_sort_key)) \
            if gens else sp.Poly(c, sp.Dummy())
        system.extend(poly.coeffs())
    sol = sp.solve(system, unknowns, dict=True)
    if not sol:
        raise ValueError("no polynomial primitive found")
    assignment = sol[0]
    free = {a: sp.Integer(0) for a in unknowns if a not in assignment}
    full = dict(free)
    for a, v in assignment.items():
        full[a] = sp.sympify(v).xreplace(free)
    return eta.map_coefficients(lambda c: sp.expand(c.xreplace(full)))


@dataclass(frozen=True)
class SourceCanonicalizeReport:
    """Decomposition pieces and identity residues of the source
    canonicalization proposition."""

    eta: dict[int, Form]
    identity_decomposition: Form   # rho - k I(rho) + (k-1) omega^s ^ I(eta_s)
    identity_residual: Form        # rho - I(rho) - p_k d R(rho)
    identity_iterated: Optional[Form]  # I(rho) - I(omega^s ^ I(eta_s)), k >= 2


def source_canonicalize(rho: Form, k: Optional[int] = None) -> SourceCanonicalizeReport:
    """Verify the canonical-source-form proposition for rho = omega^sigma ^ eta_sigma."""
    space = rho.space
    if k is None:
        k = _check_source_degree(rho)
    eta: dict[int, Form] = {}
    for atoms, coeff in rho.terms.items():
        pos = next((p for p, a in enumerate(atoms)
                    if isinstance(a, Omega) and len(a.J) == 0), None)
        if pos is None:
            raise ValueError("not a source form: term without omega^sigma "
                             "factor")
        sigma = atoms[pos].sigma
        rest = atoms[:pos] + atoms[pos + 1:]
        piece = Form(space, rho.degree - 1,
                     {rest: ((-1) ** pos) * coeff}, _checked=True)
        eta[sigma] = piece if sigma not in eta else eta[sigma] + piece
    I_rho = interior_euler(rho).form
    recomposed = fm.zero(space, rho.degree)
    for sigma, eta_s in eta.items():
        if k >= 2:
            inner = interior_euler(eta_s).form
        else:
            inner = fm.horizontalize(eta_s)
        recomposed = recomposed + fm.wedge(fm.omega(space, sigma), inner)
    decomposition = rho - k * I_rho + (k - 1) * recomposed
    R = residual(rho)
    residual_identity = rho - I_rho - fm.contact_component(fm.exterior_d(R), k)
    iterated = None
    if k >= 2:
        iterated = I_rho - interior_euler(recomposed).form
    return SourceCanonicalizeReport(eta, decomposition, residual_identity,
                                    iterated)


def reduced_helmholtz_mechanics(eps: SourceForm | Form):
    """The reduced Helmholtz form of mechanics (n = 1, second order).

    Returns (H_bar as a SourceForm, witness eta) and verifies
    H_bar - H - p_2 d eta = 0 exactly.
    """
    form = eps.form if isinstance(eps, SourceForm) else eps
    space = form.space
    if space.n != 1:
        raise ValueError("reduced Helmholtz form is a mechanics construction")
    if form.degree != 2 or form.order > 2:
        raise ValueError("expects a second-order dynamical form")
    m = space.m
    E = {}
    for sigma in range(1, m + 1):
        E[sigma] = form.coefficient((Omega(sigma), Dx(1)))
    J1 = MultiIndex((1,))
    J2 = MultiIndex((1, 1))
    q = {s: space.fibre_symbol(s) for s in range(1, m + 1)}
    qd = {s: space.fibre_symbol(s, J1) for s in range(1, m + 1)}
    qdd = {s: space.fibre_symbol(s, J2) for s in range(1, m + 1)}
    dt = fm.dx(space, 1)

    def d_t(e):
        return symexpr.total_derivative(space, e, 1)

    half = sp.Rational(1, 2)
    H_bar = fm.zero(space, 3)
    eta = fm.zero(space, 2)
    for s in range(1, m + 1):
        for nu in range(1, m + 1):
            a0 = (sp.diff(E[s], q[nu]) - sp.diff(E[nu], q[s])
                  - half * d_t(sp.diff(E[s], qd[nu]) - sp.diff(E[nu], qd[s])))
            a1 = (sp.diff(E[s], qd[nu]) + sp.diff(E[nu], qd[s])
                  - d_t(sp.diff(E[s], qdd[nu]) + sp.diff(E[nu], qdd[s])))
            a2 = sp.diff(E[s], qdd[nu]) - sp.diff(E[nu], qdd[s])
            block = (a0 * fm.omega(space, nu)
                     + a1 * fm.omega(space, nu, J1)
                     + a2 * fm.omega(space, nu, J2))
            H_bar = H_bar + half * fm.wedge_all(block, fm.omega(space, s), dt)
            eta = eta + (-sp.Rational(1, 4)) * d_t(a2) * fm.wedge(
                fm.omega(space, nu), fm.omega(space, s))
    H = helmholtz(form).form
    residue = H_bar - H - fm.contact_component(fm.exterior_d(eta), 2)
    if residue.equals(fm.zero(space, 3)) is not True:
        raise AssertionError("reduced Helmholtz relation failed "
                             "(internal error)")
    return SourceForm(H_bar, 2, canonical=False), eta

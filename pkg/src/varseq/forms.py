"""Exterior algebra in the contact-adapted coframe on J^s Y.

Forms are stored exclusively over the coframe {dx^i, omega^sigma_J}
with omega^sigma_J = dy^sigma_J - y^sigma_{Jj} dx^j.  Each form carries
a jet order s (the carrier space J^s Y); omega atoms satisfy |J| <= s-1
and coefficients live on order <= s.  Terms are kept as a mapping from
a strictly sorted atom tuple to a scalar coefficient, with the sorting
sign absorbed into the coefficient, so the contact splitting p_k is a
plain term filter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

import sympy as sp

from .jet_space import JetCoordinate, JetSpace, MultiIndex
from . import symexpr

__all__ = [
    "Dx",
    "Omega",
    "Dy",
    "Form",
    "AdaptedVectorField",
    "zero",
    "scalar_form",
    "wedge",
    "wedge_all",
    "lift",
    "unit_vertical",
    "total_field",
    "exterior_d",
    "contact_component",
    "horizontalize",
    "d_H",
    "d_V",
    "contract",
    "is_strongly_contact",
    "ingest_coordinate_basis",
    "dx",
    "omega",
    "omega0",
    "omega_i",
    "form_to_json",
    "form_from_json",
]


@dataclass(frozen=True, order=True)
class Dx:
    """The coframe atom dx^i."""

    i: int

    @property
    def sort_key(self):
        return (0, self.i, ())


@dataclass(frozen=True, order=True)
class Omega:
    """The contact coframe atom omega^sigma_J."""

    sigma: int
    J: MultiIndex = MultiIndex()

    @property
    def sort_key(self):
        return (1, self.sigma, self.J.entries)


@dataclass(frozen=True, order=True)
class Dy:
    """Coordinate-basis atom dy^sigma_J; input only (see ingest)."""

    sigma: int
    J: MultiIndex = MultiIndex()


Atom = Union[Dx, Omega]


def _sort_atoms(atoms: Iterable[Atom]) -> Optional[tuple[tuple[Atom, ...], int]]:
    """Sort atoms, returning (sorted tuple, parity sign) or None if repeated."""
    atoms = list(atoms)
    keys = [a.sort_key for a in atoms]
    if len(set(keys)) != len(keys):
        return None
    sign = 1
    # insertion sort with transposition counting
    for i in range(1, len(atoms)):
        j = i
        while j > 0 and atoms[j - 1].sort_key > atoms[j].sort_key:
            atoms[j - 1], atoms[j] = atoms[j], atoms[j - 1]
            sign = -sign
            j -= 1
    return tuple(atoms), sign


class Form:
    """A differential form on J^s Y in the contact-adapted coframe."""

    def __init__(self, space: JetSpace, degree: int,
                 terms: Mapping[tuple[Atom, ...], sp.Expr],
                 order: Optional[int] = None, _checked: bool = False) -> None:
        self.space = space
        self.degree = degree
        clean: dict[tuple[Atom, ...], sp.Expr] = {}
        for atoms, coeff in terms.items():
            coeff = sp.sympify(coeff)
            if not _checked:
                # user-facing path: canonicalize eagerly
                coeff = sp.expand(coeff)
                if coeff == 0:
                    continue
                if len(atoms) != degree:
                    raise ValueError("atom count does not match degree")
                srt = _sort_atoms(atoms)
                if srt is None:
                    continue
                atoms, sign = srt
                coeff = sign * coeff
            elif coeff == 0:
                continue
            clean[atoms] = clean.get(atoms, 0) + coeff
            if clean[atoms] == 0:
                del clean[atoms]
        self.terms = clean
        minimal = self.minimal_order()
        if order is None:
            order = minimal
        elif order < minimal:
            raise ValueError("declared order %d below minimal order %d"
                             % (order, minimal))
        self.order = order

    # structural helpers

    def minimal_order(self) -> int:
        out = 0
        for atoms, coeff in self.terms.items():
            out = max(out, self.space.jet_order(coeff))
            for a in atoms:
                if isinstance(a, Omega):
                    out = max(out, len(a.J) + 1)
                    if a.sigma > self.space.m or any(
                            i > self.space.n for i in a.J.entries):
                        raise ValueError("atom outside space: %r" % (a,))
                elif a.i > self.space.n:
                    raise ValueError("atom outside space: %r" % (a,))
        return out

    def is_zero(self) -> bool:
        return all(sp.expand(c) == 0 for c in self.terms.values())

    def canonical(self) -> "Form":
        """Expand all coefficients and prune zero terms."""
        terms = {}
        for atoms, coeff in self.terms.items():
            coeff = sp.expand(coeff)
            if coeff != 0:
                terms[atoms] = coeff
        out = Form(self.space, self.degree, terms, order=self.order,
                   _checked=True)
        return out

    def contact_count(self, atoms: tuple[Atom, ...]) -> int:
        return sum(1 for a in atoms if isinstance(a, Omega))

    def map_coefficients(self, fn) -> "Form":
        return Form(self.space, self.degree,
                    {a: fn(c) for a, c in self.terms.items()},
                    order=None, _checked=True)

    def coefficient(self, atoms: Iterable[Atom]) -> sp.Expr:
        srt = _sort_atoms(atoms)
        if srt is None:
            return sp.Integer(0)
        sorted_atoms, sign = srt
        return sign * self.terms.get(sorted_atoms, sp.Integer(0))

    # ring structure

    def __add__(self, other: "Form") -> "Form":
        if not isinstance(other, Form):
            return NotImplemented
        if other.space != self.space or other.degree != self.degree:
            raise ValueError("cannot add forms of different space or degree")
        terms = dict(self.terms)
        for atoms, coeff in other.terms.items():
            terms[atoms] = terms.get(atoms, 0) + coeff
        return Form(self.space, self.degree, terms,
                    order=max(self.order, other.order), _checked=True)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-1) * other

    def __neg__(self) -> "Form":
        return (-1) * self

    def __mul__(self, scalar) -> "Form":
        scalar = sp.sympify(scalar)
        order = max(self.order, self.space.jet_order(scalar))
        return Form(self.space, self.degree,
                    {a: scalar * c for a, c in self.terms.items()},
                    order=order, _checked=True)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        if self.is_zero():
            return "Form<0; degree %d, order %d>" % (self.degree, self.order)
        bits = []
        for atoms in sorted(self.terms, key=lambda t: [a.sort_key for a in t]):
            atom_str = "^".join(_atom_str(self.space, a) for a in atoms)
            bits.append("(%s)%s" % (self.terms[atoms],
                                    " " + atom_str if atom_str else ""))
        return "Form<%s; order %d>" % (" + ".join(bits), self.order)

    def equals(self, other: "Form") -> Optional[bool]:
        """Exact canonical equality, ignoring carrier-order tags.

        Returns None ("unknown") when some coefficient difference is not
        rational-closed; callers then fall back to the probe module.
        """
        if self.space != other.space or self.degree != other.degree:
            return False
        diff = self - other
        unknown = False
        for coeff in diff.terms.values():
            verdict = symexpr.equal(coeff, 0)
            if verdict is False:
                return False
            if verdict is None:
                unknown = True
        return None if unknown else True


def _atom_str(space: JetSpace, a: Atom) -> str:
    if isinstance(a, Dx):
        return "d(%s)" % space.base_names[a.i - 1]
    name = space.fibre_names[a.sigma - 1]
    if len(a.J):
        return "w(%s,[%s])" % (name, ",".join(space.base_names[i - 1]
                                              for i in a.J.entries))
    return "w(%s)" % name


# constructors


def zero(space: JetSpace, degree: int, order: int = 0) -> Form:
    return Form(space, degree, {}, order=order)


def scalar_form(space: JetSpace, coeff, order: Optional[int] = None) -> Form:
    return Form(space, 0, {(): sp.sympify(coeff)}, order=order)


def dx(space: JetSpace, i: int) -> Form:
    return Form(space, 1, {(Dx(i),): sp.Integer(1)})


def omega(space: JetSpace, sigma: int, J: MultiIndex = MultiIndex()) -> Form:
    return Form(space, 1, {(Omega(sigma, J),): sp.Integer(1)})


def omega0(space: JetSpace) -> Form:
    """The base volume form dx^1 ^ ... ^ dx^n."""
    atoms = tuple(Dx(i) for i in range(1, space.n + 1))
    return Form(space, space.n, {atoms: sp.Integer(1)})


def omega_i(space: JetSpace, i: int) -> Form:
    """omega_i = d/dx^i hook omega0."""
    atoms = tuple(Dx(j) for j in range(1, space.n + 1) if j != i)
    sign = (-1) ** (i - 1)
    return Form(space, space.n - 1, {atoms: sp.Integer(sign)})


# operations


def wedge(a: Form, b: Form) -> Form:
    if a.space != b.space:
        raise ValueError("wedge of forms on different spaces")
    terms: dict[tuple[Atom, ...], sp.Expr] = {}
    for atoms_a, ca in a.terms.items():
        for atoms_b, cb in b.terms.items():
            srt = _sort_atoms(atoms_a + atoms_b)
            if srt is None:
                continue
            atoms, sign = srt
            terms[atoms] = terms.get(atoms, 0) + sign * ca * cb
    return Form(a.space, a.degree + b.degree, terms,
                order=max(a.order, b.order), _checked=True)


def wedge_all(*forms: Form) -> Form:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def lift(rho: Form, order: int) -> Form:
    """Pullback to a higher jet order; identity on the contact basis."""
    if order < rho.order:
        raise ValueError("cannot lift to a lower order")
    return Form(rho.space, rho.degree, rho.terms, order=order, _checked=True)


def ingest_coordinate_basis(space: JetSpace,
                            terms: Iterable[tuple[sp.Expr, Iterable[Union[Dx, Dy]]]],
                            r: int) -> Form:
    """Re-express coordinate-basis terms over {dx, omega} on order r+1.

    dy^sigma_J maps to omega^sigma_J + y^sigma_{Jj} dx^j; requires
    |J| <= r.
    """
    out: Optional[Form] = None
    for coeff, atoms in terms:
        part = scalar_form(space, coeff)
        for a in atoms:
            if isinstance(a, Dx):
                one_form = dx(space, a.i)
            elif isinstance(a, Dy):
                if len(a.J) > r:
                    raise ValueError("dy with |J| > r cannot be ingested "
                                     "at order %d" % (r,))
                one_form = omega(space, a.sigma, a.J)
                for j in range(1, space.n + 1):
                    one_form = one_form + (
                        space.fibre_symbol(a.sigma, a.J.append(j))
                        * dx(space, j))
            else:
                raise ValueError("unsupported atom: %r" % (a,))
            part = wedge(part, one_form)
        out = part if out is None else out + part
    if out is None:
        raise ValueError("no terms to ingest")
    return lift(out, max(out.order, r + 1))


def exterior_d(rho: Form) -> Form:
    """Exterior derivative through the contact basis; order goes up by 1."""
    space = rho.space
    terms: dict[tuple[Atom, ...], sp.Expr] = {}

    def emit(atoms: Iterable[Atom], coeff: sp.Expr) -> None:
        srt = _sort_atoms(atoms)
        if srt is None:
            return
        sorted_atoms, sign = srt
        terms[sorted_atoms] = terms.get(sorted_atoms, 0) + sign * coeff

    for atoms, coeff in rho.terms.items():
        # d of the coefficient: d f = d_i f dx^i + (df/dy^sigma_J) omega^sigma_J
        for i in range(1, space.n + 1):
            di = symexpr.total_derivative(space, coeff, i)
            if di != 0:
                emit((Dx(i),) + atoms, di)
        for s in sorted(coeff.free_symbols, key=sp.default_sort_key):
            coord = space.coordinate_of(s)
            if coord is None or coord.kind != "fibre":
                continue
            dv = symexpr.partial(space, coeff, s)
            if dv != 0:
                emit((Omega(coord.index, coord.J),) + atoms, dv)
        # structure equation: d omega^sigma_J = -omega^sigma_{Jj} ^ dx^j
        for p, a in enumerate(atoms):
            if not isinstance(a, Omega):
                continue
            koszul = (-1) ** p
            for j in range(1, space.n + 1):
                new = (atoms[:p]
                       + (Omega(a.sigma, a.J.append(j)), Dx(j))
                       + atoms[p + 1:])
                emit(new, -koszul * coeff)
    return Form(space, rho.degree + 1, terms,
                order=rho.order + 1, _checked=True)


def contact_component(rho: Form, k: int) -> Form:
    """The k-contact part p_k (a term filter in the contact basis)."""
    if not 0 <= k <= rho.degree:
        raise ValueError("contact degree out of range")
    terms = {a: c for a, c in rho.terms.items()
             if rho.contact_count(a) == k}
    return Form(rho.space, rho.degree, terms, order=rho.order, _checked=True)


def horizontalize(rho: Form) -> Form:
    """h = p_0."""
    return contact_component(rho, 0)


def _by_contact_degree(rho: Form) -> dict[int, Form]:
    out: dict[int, dict] = {}
    for atoms, coeff in rho.terms.items():
        out.setdefault(rho.contact_count(atoms), {})[atoms] = coeff
    return {k: Form(rho.space, rho.degree, t, order=rho.order, _checked=True)
            for k, t in out.items()}


def d_H(rho: Form) -> Form:
    """Horizontal differential: p_k(d .) on each k-contact component."""
    out = zero(rho.space, rho.degree + 1, rho.order + 1)
    for k, part in _by_contact_degree(rho).items():
        out = out + contact_component(exterior_d(part), k)
    return out


def d_V(rho: Form) -> Form:
    """Vertical differential: p_{k+1}(d .) on each k-contact component."""
    out = zero(rho.space, rho.degree + 1, rho.order + 1)
    for k, part in _by_contact_degree(rho).items():
        out = out + contact_component(exterior_d(part), k + 1)
    return out


@dataclass(frozen=True)
class AdaptedVectorField:
    """A field along the projection in the adapted frame {d_i, d/dy^sigma_J}.

    The base part pairs only with dx atoms (d_i hook dx^j = delta); the
    vertical part pairs only with omega atoms (d/dy^sigma_J hook
    omega^nu_K = delta delta).  Coordinate-frame fields are converted by
    the horizontal/vertical split in the prolong module.
    """

    space: JetSpace
    base: Mapping[int, sp.Expr] = field(default_factory=dict)
    vertical: Mapping[tuple[int, MultiIndex], sp.Expr] = field(default_factory=dict)


def unit_vertical(space: JetSpace, sigma: int,
                  J: MultiIndex = MultiIndex()) -> AdaptedVectorField:
    """The frame field d/dy^sigma_J."""
    return AdaptedVectorField(space, {}, {(sigma, J): sp.Integer(1)})


def total_field(space: JetSpace, i: int) -> AdaptedVectorField:
    """The total-derivative frame field d_i."""
    return AdaptedVectorField(space, {i: sp.Integer(1)}, {})


def contract(X: AdaptedVectorField, rho: Form) -> Form:
    """Interior product with graded sign bookkeeping."""
    if X.space != rho.space:
        raise ValueError("field and form live on different spaces")
    terms: dict[tuple[Atom, ...], sp.Expr] = {}
    for atoms, coeff in rho.terms.items():
        for p, a in enumerate(atoms):
            if isinstance(a, Dx):
                comp = X.base.get(a.i)
            else:
                comp = X.vertical.get((a.sigma, a.J))
            if comp is None or comp == 0:
                continue
            rest = atoms[:p] + atoms[p + 1:]
            terms[rest] = terms.get(rest, 0) + ((-1) ** p) * comp * coeff
    order = rho.order
    for comp in list(X.base.values()) + list(X.vertical.values()):
        order = max(order, rho.space.jet_order(comp))
    return Form(rho.space, rho.degree - 1, terms, order=order, _checked=True)


def is_strongly_contact(rho: Form) -> bool:
    """p_{q-n} rho = 0, defined for degree q > n."""
    k = rho.degree - rho.space.n
    if k <= 0:
        raise ValueError("strong contactness needs degree > n")
    return contact_component(rho, k).is_zero()


# serialization


def form_to_json(rho: Form) -> dict:
    terms = []
    for atoms in sorted(rho.terms, key=lambda t: [a.sort_key for a in t]):
        atom_nodes = []
        for a in atoms:
            if isinstance(a, Dx):
                atom_nodes.append({"kind": "dx", "i": a.i})
            else:
                atom_nodes.append({"kind": "omega", "sigma": a.sigma,
                                   "J": list(a.J.entries)})
        terms.append({"coeff": symexpr.expr_to_json(rho.terms[atoms]),
                      "atoms": atom_nodes})
    return {"order": rho.order, "degree": rho.degree, "terms": terms}


def form_from_json(space: JetSpace, node: dict) -> Form:
    terms: dict[tuple[Atom, ...], sp.Expr] = {}
    for t in node["terms"]:
        atoms = []
        for a in t["atoms"]:
            if a["kind"] == "dx":
                atoms.append(Dx(a["i"]))
            else:
                atoms.append(Omega(a["sigma"], MultiIndex(tuple(a["J"]))))
        terms[tuple(atoms)] = symexpr.expr_from_json(t["coeff"])
    return Form(space, node["degree"], terms, order=node["order"])

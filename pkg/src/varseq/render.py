"""Text, LaTeX, and JSON emitters for scalars, forms, and model files.

The text format for forms coincides with the .jv expression syntax, so
every text rendering can be pasted back into a model file; the model
renderer produces a full .jv document with ``parse(render(parse(t))) ==
parse(t)``.
"""

from __future__ import annotations

import sympy as sp

from .jet_space import JetSpace, MultiIndex
from . import symexpr
from .forms import Dx, Form, Omega, form_to_json
from .dsl import ModelFile

__all__ = [
    "scalar_text",
    "scalar_latex",
    "form_text",
    "form_latex",
    "form_json",
    "render_model",
]


def scalar_text(expr) -> str:
    return sp.sstr(sp.sympify(expr), order="lex")


def scalar_latex(expr) -> str:
    return symexpr.expr_to_latex(expr)


def _atom_text(space: JetSpace, a) -> str:
    if isinstance(a, Dx):
        return "d(%s)" % space.base_names[a.i - 1]
    name = space.fibre_names[a.sigma - 1]
    if len(a.J):
        return "w(%s,[%s])" % (name, ",".join(
            space.base_names[i - 1] for i in a.J.entries))
    return "w(%s)" % name


def _atom_latex(space: JetSpace, a) -> str:
    if isinstance(a, Dx):
        return r"\mathrm{d}%s" % sp.latex(sp.Symbol(space.base_names[a.i - 1]))
    name = sp.latex(sp.Symbol(space.fibre_names[a.sigma - 1]))
    sub = "".join(space.base_names[i - 1] for i in a.J.entries)
    if sub:
        return r"\omega^{%s}_{%s}" % (name, sub)
    return r"\omega^{%s}" % name


def _sorted_terms(rho: Form):
    return sorted(rho.terms, key=lambda t: [a.sort_key for a in t])


def form_text(rho: Form) -> str:
    rho = rho.canonical()
    if not rho.terms:
        return "0"
    bits = []
    for atoms in _sorted_terms(rho):
        coeff = "(%s)" % scalar_text(rho.terms[atoms])
        atom_str = "^".join(_atom_text(rho.space, a) for a in atoms)
        bits.append(coeff + (" * " + atom_str if atom_str else ""))
    return " + ".join(bits)


def form_latex(rho: Form) -> str:
    rho = rho.canonical()
    if not rho.terms:
        return "0"
    bits = []
    for atoms in _sorted_terms(rho):
        coeff = r"\left(%s\right)" % scalar_latex(rho.terms[atoms])
        atom_str = r" \wedge ".join(_atom_latex(rho.space, a) for a in atoms)
        bits.append(coeff + (r"\, " + atom_str if atom_str else ""))
    return " + ".join(bits)


def form_json(rho: Form) -> dict:
    return form_to_json(rho.canonical())


def render_model(model: ModelFile) -> str:
    """Emit a .jv document equivalent to the parsed model."""
    space = model.space
    lines = ["space { base %s; fibre %s; }" % (" ".join(space.base_names),
                                               " ".join(space.fibre_names))]
    if model.params:
        lines.append("param %s;" % " ".join(model.params))
    for name, slots in model.opaques.items():
        lines.append("opaque %s(%s);" % (name, ", ".join(map(str, slots))))
    for name, rho in model.forms.items():
        lines.append("form %s : degree %d order %d = %s;"
                     % (name, rho.degree, rho.order, form_text(rho)))
    for name, X in model.fields.items():
        terms = []
        for i in sorted(X.xi):
            terms.append("(%s) * D(%s)" % (scalar_text(X.xi[i]),
                                           space.base_names[i - 1]))
        for sigma in sorted(X.Xi):
            terms.append("(%s) * D(%s)" % (scalar_text(X.Xi[sigma]),
                                           space.fibre_names[sigma - 1]))
        lines.append("field %s = %s;" % (name, " + ".join(terms) or "0"))
    return "\n".join(lines) + "\n"

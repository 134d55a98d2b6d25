"""Exact symbolic scalars over jet coordinates.

Expressions are sympy trees over coordinate symbols of a
:class:`~varseq.jet_space.JetSpace`, named parameters, elementary
functions, and opaque function atoms (undefined functions applied to a
fixed tuple of jet coordinates, with derivatives kept as ``Derivative``
records).  All coefficients are exact rationals; canonicalization is a
shallow expand, and semantic equality beyond polynomial closure is
delegated to the probe module.
"""

from __future__ import annotations

import numbers
from typing import Mapping, Optional

import sympy as sp
from sympy.core.function import AppliedUndef

from .jet_space import JetCoordinate, JetSpace, MultiIndex

__all__ = [
    "opaque",
    "partial",
    "total_derivative",
    "total_derivative_multi",
    "canonicalize",
    "equal",
    "eval_at",
    "expr_to_json",
    "expr_from_json",
    "expr_to_latex",
]

_ELEMENTARY = (sp.sin, sp.cos, sp.exp, sp.log)


def opaque(name: str, *slots: sp.Symbol) -> sp.Expr:
    """An opaque function atom with the given argument slots."""
    return sp.Function(name)(*slots)


def _as_symbol(space: JetSpace, c) -> sp.Symbol:
    if isinstance(c, JetCoordinate):
        return space.symbol(c)
    return sp.Symbol(c) if isinstance(c, str) else c


def partial(space: JetSpace, e: sp.Expr, c) -> sp.Expr:
    """Partial derivative with respect to a single coordinate.

    On opaque atoms this increments the matching slot's derivative
    record; differentiation with respect to an undeclared slot gives 0.
    """
    return _partial(sp.sympify(e), _as_symbol(space, c))


def _partial(e: sp.Expr, s: sp.Symbol) -> sp.Expr:
    """Chain-rule partial derivative avoiding sympy's generic dispatch."""
    if e.is_Number or s not in e.free_symbols:
        return sp.Integer(0)
    if e.is_Symbol:
        return sp.Integer(1) if e == s else sp.Integer(0)
    if isinstance(e, (AppliedUndef, sp.Derivative)):
        return _atom_partial(e, s)
    if e.is_Add:
        return sp.Add(*[_partial(a, s) for a in e.args])
    if e.is_Mul:
        parts = []
        args = e.args
        for p, f in enumerate(args):
            df = _partial(f, s)
            if df != 0:
                parts.append(sp.Mul(*args[:p], df, *args[p + 1:]))
        return sp.Add(*parts)
    if e.is_Pow:
        base, expo = e.base, e.exp
        out = sp.Integer(0)
        db = _partial(base, s)
        de = _partial(expo, s)
        if db != 0:
            out += expo * base ** (expo - 1) * db
        if de != 0:
            out += e * sp.log(base) * de
        return out
    if isinstance(e, sp.Function):
        out = sp.Integer(0)
        for p, a in enumerate(e.args, start=1):
            da = _partial(a, s)
            if da != 0:
                out += e.fdiff(p) * da
        return out
    return sp.diff(e, s)


_TD_CACHE: dict = {}


def total_derivative(space: JetSpace, e: sp.Expr, i: int) -> sp.Expr:
    """The i-th total derivative d_i = partial_i + y^sigma_{Ji} d/dy^sigma_J.

    Implemented as a chain-rule walk over the expression tree; sympy's
    generic differentiation is invoked only on single opaque atoms (and
    memoized), which keeps large sums of derivative records fast.
    """
    e = sp.sympify(e)
    key = (space, e, i)
    cached = _TD_CACHE.get(key)
    if cached is not None:
        return cached
    out = _td_walk(space, e, i)
    if len(_TD_CACHE) > 100000:
        _TD_CACHE.clear()
    _TD_CACHE[key] = out
    return out


_PD_CACHE: dict = {}


def _atom_partial(e: sp.Expr, s: sp.Symbol) -> sp.Expr:
    """Partial derivative of a single opaque atom, memoized.

    Builds the merged derivative record directly (matching sympy's
    canonical variable ordering) instead of going through sp.diff,
    which is an order of magnitude faster on derivative atoms.
    """
    key = (e, s)
    cached = _PD_CACHE.get(key)
    if cached is not None:
        return cached
    base = e.expr if isinstance(e, sp.Derivative) else e
    if (isinstance(base, AppliedUndef)
            and all(a.is_Symbol for a in base.args)
            and len(set(base.args)) == len(base.args)):
        if s not in base.args:
            out = sp.Integer(0)
        else:
            vc: dict[sp.Symbol, int] = {}
            if isinstance(e, sp.Derivative):
                for v, c in e.variable_count:
                    vc[v] = vc.get(v, 0) + int(c)
            vc[s] = vc.get(s, 0) + 1
            pairs = sorted(vc.items(),
                           key=lambda p: sp.default_sort_key(p[0]))
            out = sp.Derivative(base, *pairs, evaluate=False)
    else:
        out = sp.diff(e, s)
    _PD_CACHE[key] = out
    return out


def _td_symbol(space: JetSpace, s: sp.Symbol, i: int) -> sp.Expr:
    coord = space.coordinate_of(s)
    if coord is None:
        return sp.Integer(0)
    if coord.kind == "base":
        return sp.Integer(1) if coord.index == i else sp.Integer(0)
    return space.fibre_symbol(coord.index, coord.J.append(i))


def _td_walk(space: JetSpace, e: sp.Expr, i: int) -> sp.Expr:
    if e.is_Number:
        return sp.Integer(0)
    if e.is_Symbol:
        return _td_symbol(space, e, i)
    if isinstance(e, (AppliedUndef, sp.Derivative)):
        slots = e.args if isinstance(e, AppliedUndef) else e.expr.args
        out = sp.Integer(0)
        for s in slots:
            ds = _td_symbol(space, s, i)
            if ds != 0:
                out += _atom_partial(e, s) * ds
        return out
    if e.is_Add:
        return sp.Add(*[total_derivative(space, a, i) for a in e.args])
    if e.is_Mul:
        parts = []
        args = e.args
        for p, f in enumerate(args):
            df = total_derivative(space, f, i)
            if df != 0:
                parts.append(sp.Mul(*args[:p], df, *args[p + 1:]))
        return sp.Add(*parts)
    if e.is_Pow:
        base, expo = e.base, e.exp
        db = total_derivative(space, base, i)
        de = total_derivative(space, expo, i)
        out = sp.Integer(0)
        if db != 0:
            out += expo * base ** (expo - 1) * db
        if de != 0:
            out += e * sp.log(base) * de
        return out
    if isinstance(e, sp.Function):
        out = sp.Integer(0)
        for p, a in enumerate(e.args, start=1):
            da = total_derivative(space, a, i)
            if da != 0:
                out += e.fdiff(p) * da
        return out
    raise ValueError("cannot differentiate expression node: %r" % (e,))


def total_derivative_multi(space: JetSpace, e: sp.Expr, J: MultiIndex) -> sp.Expr:
    """Iterated total derivative d_J; application order is irrelevant."""
    for i in J.entries:
        e = total_derivative(space, e, i)
    return e


def canonicalize(e: sp.Expr) -> sp.Expr:
    """Expanded sum of monomials with rational coefficients; idempotent."""
    return sp.expand(sp.sympify(e))


def is_rational_closed(e: sp.Expr) -> bool:
    """True when e is a rational tree over its atoms.

    Opaque atoms and their derivative records count as atoms; elementary
    functions and non-integer powers break closure.
    """
    e = sp.sympify(e)
    for p in e.atoms(sp.Pow):
        if not p.exp.is_Integer:
            return False
    for f in e.atoms(sp.Function):
        if not isinstance(f, AppliedUndef):
            return False
    if e.atoms(sp.Float):
        return False
    return True


def equal(e1: sp.Expr, e2: sp.Expr) -> Optional[bool]:
    """Exact equality of canonical forms; None means "unknown".

    True and False verdicts are exact.  For trees that are not rational
    over their atoms the verdict is None and the caller should fall back
    to numeric probing.
    """
    diff = canonicalize(sp.sympify(e1) - sp.sympify(e2))
    if diff == 0:
        return True
    diff = sp.cancel(sp.together(diff))
    if diff == 0:
        return True
    if is_rational_closed(diff):
        return False
    return None


def _instantiate(space: JetSpace, e: sp.Expr,
                 instantiations: Mapping[str, sp.Expr]) -> sp.Expr:
    """Replace opaque atoms (and their derivatives) by registered expressions.

    Each instantiation maps an opaque name to an expression in the same
    coordinate symbols the atom is applied to.
    """
    rep: dict[sp.Expr, sp.Expr] = {}
    for d in e.atoms(sp.Derivative):
        f = d.expr
        if isinstance(f, AppliedUndef) and f.func.__name__ in instantiations:
            rep[d] = sp.diff(instantiations[f.func.__name__],
                             *d.variable_count)
    for f in e.atoms(AppliedUndef):
        if f.func.__name__ in instantiations:
            rep[f] = instantiations[f.func.__name__]
    return e.xreplace(rep) if rep else e


def eval_at(space: JetSpace, e: sp.Expr, assignment: Mapping,
            instantiations: Optional[Mapping[str, sp.Expr]] = None):
    """Evaluate at rational coordinate/parameter values.

    Returns an exact rational when the tree is rational-closed,
    otherwise a float.  Opaque atoms require a registered polynomial
    instantiation.
    """
    e = sp.sympify(e)
    if instantiations:
        e = _instantiate(space, e, instantiations)
    subs = {}
    for key, value in assignment.items():
        sym = _as_symbol(space, key)
        if isinstance(value, numbers.Rational) and not isinstance(value, int):
            value = sp.Rational(value.numerator, value.denominator)
        subs[sym] = sp.Rational(value) if not isinstance(value, sp.Expr) else value
    if e.atoms(AppliedUndef):
        raise ValueError("opaque atoms without registered instantiation: %s"
                         % sorted({f.func.__name__
                                   for f in e.atoms(AppliedUndef)}))
    result = e.xreplace(subs)
    missing = result.free_symbols
    if missing:
        raise ValueError("missing assignment for %s"
                         % sorted(s.name for s in missing))
    result = sp.cancel(result) if is_rational_closed(result) else result
    if result.is_Rational:
        return result
    return float(result.evalf())


# serialization


def expr_to_json(e: sp.Expr) -> object:
    """Stable JSON tree for a scalar expression."""
    e = sp.sympify(e)
    if e.is_Integer:
        return {"kind": "rational", "p": int(e), "q": 1}
    if e.is_Rational:
        return {"kind": "rational", "p": int(e.p), "q": int(e.q)}
    if e.is_Symbol:
        return {"kind": "symbol", "name": e.name}
    if isinstance(e, sp.Derivative):
        return {
            "kind": "derivative",
            "expr": expr_to_json(e.expr),
            "vars": [{"name": v.name, "count": int(c)}
                     for v, c in e.variable_count],
        }
    if isinstance(e, AppliedUndef):
        return {"kind": "opaque", "name": e.func.__name__,
                "args": [expr_to_json(a) for a in e.args]}
    if isinstance(e, sp.Function):
        return {"kind": "func", "name": type(e).__name__,
                "args": [expr_to_json(a) for a in e.args]}
    if e.is_Add or e.is_Mul:
        kind = "add" if e.is_Add else "mul"
        args = sorted(e.args, key=sp.default_sort_key)
        return {"kind": kind, "args": [expr_to_json(a) for a in args]}
    if e.is_Pow:
        return {"kind": "pow", "base": expr_to_json(e.base),
                "exp": expr_to_json(e.exp)}
    raise ValueError("unsupported expression node: %r" % (e,))


def expr_from_json(node: object) -> sp.Expr:
    """Inverse of :func:`expr_to_json`."""
    if not isinstance(node, dict):
        raise ValueError("malformed expression node: %r" % (node,))
    kind = node.get("kind")
    if kind == "rational":
        return sp.Rational(node["p"], node["q"])
    if kind == "symbol":
        return sp.Symbol(node["name"])
    if kind == "add":
        return sp.Add(*[expr_from_json(a) for a in node["args"]])
    if kind == "mul":
        return sp.Mul(*[expr_from_json(a) for a in node["args"]])
    if kind == "pow":
        return sp.Pow(expr_from_json(node["base"]),
                      expr_from_json(node["exp"]))
    if kind == "func":
        fn = getattr(sp, node["name"], None)
        if fn is None:
            raise ValueError("unknown function: %r" % (node["name"],))
        return fn(*[expr_from_json(a) for a in node["args"]])
    if kind == "opaque":
        f = sp.Function(node["name"])(*[expr_from_json(a)
                                        for a in node["args"]])
        return f
    if kind == "derivative":
        f = expr_from_json(node["expr"])
        vc = [(sp.Symbol(v["name"]), v["count"]) for v in node["vars"]]
        return sp.Derivative(f, *vc)
    raise ValueError("unknown expression node kind: %r" % (kind,))


def expr_to_latex(e: sp.Expr) -> str:
    return sp.latex(sp.sympify(e))

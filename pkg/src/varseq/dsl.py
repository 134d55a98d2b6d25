"""A small text format (.jv) for jet-space models.

Statements are ``;``-terminated::

    space { base t; fibre q; }
    param m k;
    opaque L(t, q, q_t);
    form lambda : degree 1 order 1 = (1/2 * m * q_t**2 - k*q**2) * d(t);
    field X = D(q) + q * D(t);

Form expressions combine scalars (rationals, parameters, coordinates,
opaque calls, elementary functions) with the coframe atoms ``d(x)`` and
``w(y,[J])`` through ``* / + - **`` and the wedge ``^``.  ``d`` of a
fibre coordinate expands through the contact basis.  Multi-indices are
bracketed base-name lists; unsorted input is canonicalized with a
warning.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

import sympy as sp

from .jet_space import JetCoordinate, JetSpace, MultiIndex
from . import forms as fm
from . import symexpr
from .forms import Dx, Dy, Form
from .prolong import ProjectableVectorField

__all__ = ["DslError", "ModelFile", "parse", "parse_file"]


class DslError(ValueError):
    """A parse or validation error with location diagnostics."""

    def __init__(self, message: str, line: int = 0, col: int = 0) -> None:
        self.message = message
        self.line = line
        self.col = col
        where = " (line %d, column %d)" % (line, col) if line else ""
        super().__init__(message + where)


@dataclass
class ModelFile:
    """A parsed model: one jet space plus named declarations."""

    space: JetSpace
    params: tuple[str, ...] = ()
    opaques: dict = field(default_factory=dict)   # name -> slot symbols
    forms: dict = field(default_factory=dict)     # name -> Form
    fields: dict = field(default_factory=dict)    # name -> vector field
    warnings: list = field(default_factory=list)


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\*\*|[{}()\[\],;:=^*/+-])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "name", "op", "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise DslError("unexpected character %r" % text[pos], line, col)
        kind = match.lastgroup
        chunk = match.group()
        if kind != "ws":
            tokens.append(_Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = match.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Scalar:
    def __init__(self, expr: sp.Expr) -> None:
        self.expr = expr


_Value = Union[_Scalar, Form]


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0
        self.model: Optional[ModelFile] = None
        self.warnings: list[str] = []

    # token plumbing

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise DslError("expected %r, found %r" % (text, tok.text or "end"),
                           tok.line, tok.col)
        return tok

    def expect_name(self) -> _Token:
        tok = self.next()
        if tok.kind != "name":
            raise DslError("expected identifier, found %r"
                           % (tok.text or "end"), tok.line, tok.col)
        return tok

    # statements

    def parse_model(self) -> ModelFile:
        while self.peek().kind != "eof":
            tok = self.expect_name()
            if tok.text == "space":
                self.parse_space(tok)
            elif tok.text == "param":
                self.parse_param(tok)
            elif tok.text == "opaque":
                self.parse_opaque(tok)
            elif tok.text == "form":
                self.parse_form(tok)
            elif tok.text == "field":
                self.parse_field(tok)
            else:
                raise DslError("unknown statement %r" % tok.text,
                               tok.line, tok.col)
        if self.model is None:
            raise DslError("model contains no space declaration")
        self.model.warnings = self.warnings
        return self.model

    def require_model(self, tok: _Token) -> ModelFile:
        if self.model is None:
            raise DslError("space must be declared first", tok.line, tok.col)
        return self.model

    def parse_names_until(self, terminator: str) -> list[str]:
        names = []
        while self.peek().text != terminator:
            tok = self.next()
            if tok.text == ",":
                continue
            if tok.kind != "name":
                raise DslError("expected identifier, found %r"
                               % (tok.text or "end"), tok.line, tok.col)
            names.append(tok.text)
        self.expect(terminator)
        return names

    def parse_space(self, tok: _Token) -> None:
        if self.model is not None:
            raise DslError("duplicate space declaration", tok.line, tok.col)
        self.expect("{")
        self.expect("base")
        base = self.parse_names_until(";")
        self.expect("fibre")
        fibre = self.parse_names_until(";")
        self.expect("}")
        try:
            space = JetSpace(tuple(base), tuple(fibre))
        except ValueError as exc:
            raise DslError(str(exc), tok.line, tok.col) from exc
        self.model = ModelFile(space)

    def parse_param(self, tok: _Token) -> None:
        model = self.require_model(tok)
        names = self.parse_names_until(";")
        for name in names:
            if model.space.coordinate_of(sp.Symbol(name)) is not None:
                raise DslError("parameter %r shadows a coordinate" % name,
                               tok.line, tok.col)
        model.params = model.params + tuple(names)

    def parse_opaque(self, tok: _Token) -> None:
        model = self.require_model(tok)
        name = self.expect_name()
        self.expect("(")
        slots = []
        while self.peek().text != ")":
            stok = self.next()
            if stok.text == ",":
                continue
            if stok.kind != "name":
                raise DslError("expected coordinate name, found %r"
                               % (stok.text or "end"), stok.line, stok.col)
            sym = sp.Symbol(stok.text)
            if model.space.coordinate_of(sym) is None \
                    and stok.text not in model.params:
                raise DslError("unknown opaque slot %r" % stok.text,
                               stok.line, stok.col)
            slots.append(sym)
        self.expect(")")
        self.expect(";")
        model.opaques[name.text] = tuple(slots)

    def parse_form(self, tok: _Token) -> None:
        model = self.require_model(tok)
        name = self.expect_name()
        self.expect(":")
        self.expect("degree")
        degree = self.parse_int()
        self.expect("order")
        order = self.parse_int()
        self.expect("=")
        value = self.parse_expr()
        self.expect(";")
        if isinstance(value, _Scalar):
            if value.expr == 0:
                value = fm.zero(model.space, degree, order)
            else:
                value = fm.scalar_form(model.space, value.expr)
        if not isinstance(value, Form) or value.degree != degree:
            found = value.degree if isinstance(value, Form) else "non-form"
            raise DslError("form %r has degree %s, declared %d"
                           % (name.text, found, degree),
                           name.line, name.col)
        try:
            value = value.canonical()
            # re-minimize: intermediate ops may have inflated the order
            value = Form(model.space, value.degree, value.terms,
                         order=None, _checked=True)
            value = fm.lift(value, order)
        except ValueError as exc:
            raise DslError("form %r violates declared order %d: %s"
                           % (name.text, order, exc), name.line, name.col)
        model.forms[name.text] = value

    def parse_field(self, tok: _Token) -> None:
        model = self.require_model(tok)
        name = self.expect_name()
        self.expect("=")
        space = model.space
        xi: dict[int, sp.Expr] = {}
        Xi: dict[int, sp.Expr] = {}
        self._field_components = (xi, Xi)
        try:
            value = self.settle_field_term(self.parse_expr())
        finally:
            self._field_components = None
        self.expect(";")
        if not (isinstance(value, _Scalar) and value.expr == 0):
            raise DslError("field %r must be a sum of <expr> * D(<coord>) "
                           "terms" % name.text, name.line, name.col)
        try:
            model.fields[name.text] = ProjectableVectorField(space, xi, Xi)
        except ValueError as exc:
            raise DslError(str(exc), name.line, name.col) from exc

    _field_components = None

    def parse_int(self) -> int:
        tok = self.next()
        if tok.kind != "num":
            raise DslError("expected integer, found %r" % (tok.text or "end"),
                           tok.line, tok.col)
        return int(tok.text)

    # expressions (precedence: ** > unary- > * / > ^ > + -)

    def parse_expr(self) -> _Value:
        return self.parse_sum()

    def parse_sum(self) -> _Value:
        value = self.parse_wedge()
        while self.peek().text in ("+", "-"):
            op = self.next()
            rhs = self.parse_wedge()
            value = self.combine_add(value, rhs, op)
        return value

    def parse_wedge(self) -> _Value:
        value = self.parse_product()
        while self.peek().text == "^":
            op = self.next()
            rhs = self.parse_product()
            value = self.combine_wedge(value, rhs, op)
        return value

    def parse_product(self) -> _Value:
        value = self.parse_unary()
        while self.peek().text in ("*", "/"):
            op = self.next()
            rhs = self.parse_unary()
            value = self.combine_mul(value, rhs, op)
        return value

    def parse_unary(self) -> _Value:
        if self.peek().text == "-":
            op = self.next()
            value = self.parse_unary()
            if isinstance(value, _Scalar):
                return _Scalar(-value.expr)
            if isinstance(value, _FieldDirection):
                return _FieldTerm(value.coord, sp.Integer(-1))
            if isinstance(value, _FieldTerm):
                return _FieldTerm(value.coord, -value.coeff)
            return (-1) * value
        if self.peek().text == "+":
            self.next()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> _Value:
        base = self.parse_atom()
        if self.peek().text == "**":
            op = self.next()
            expo = self.parse_unary()
            if not isinstance(base, _Scalar) or not isinstance(expo, _Scalar):
                raise DslError("** applies to scalars only", op.line, op.col)
            return _Scalar(base.expr ** expo.expr)
        return base

    def parse_atom(self) -> _Value:
        tok = self.next()
        model = self.model
        if tok.text == "(":
            value = self.parse_expr()
            self.expect(")")
            return value
        if tok.kind == "num":
            return _Scalar(sp.Integer(int(tok.text)))
        if tok.kind != "name":
            raise DslError("unexpected %r" % (tok.text or "end"),
                           tok.line, tok.col)
        # d/w/D act as builtins only when applied; "w" alone can still
        # name a coordinate (there is no implicit multiplication)
        if self.peek().text == "(":
            if tok.text == "d":
                return self.parse_d(tok)
            if tok.text == "w":
                return self.parse_w(tok)
            if tok.text == "D":
                return self.parse_D(tok)
        if tok.text in model.opaques:
            return _Scalar(self.parse_opaque_call(tok))
        if self.peek().text == "(" and hasattr(sp, tok.text) \
                and callable(getattr(sp, tok.text)):
            self.expect("(")
            arg = self.parse_expr()
            self.expect(")")
            if not isinstance(arg, _Scalar):
                raise DslError("%s applies to scalars" % tok.text,
                               tok.line, tok.col)
            return _Scalar(getattr(sp, tok.text)(arg.expr))
        sym = sp.Symbol(tok.text)
        if model.space.coordinate_of(sym) is not None \
                or tok.text in model.params:
            return _Scalar(sym)
        raise DslError("unknown identifier %r" % tok.text, tok.line, tok.col)

    def parse_opaque_call(self, tok: _Token) -> sp.Expr:
        slots = self.model.opaques[tok.text]
        if self.peek().text == "(":
            self.next()
            args = []
            while self.peek().text != ")":
                atok = self.peek()
                if atok.text == ",":
                    self.next()
                    continue
                arg = self.parse_expr()
                if not isinstance(arg, _Scalar):
                    raise DslError("opaque arguments must be scalars",
                                   atok.line, atok.col)
                args.append(arg.expr)
            self.expect(")")
            if tuple(args) != tuple(slots):
                raise DslError("opaque %r must be applied to its declared "
                               "slots" % tok.text, tok.line, tok.col)
        return symexpr.opaque(tok.text, *slots)

    def parse_coordinate(self, context: str) -> JetCoordinate:
        tok = self.expect_name()
        coord = self.model.space.coordinate_of(sp.Symbol(tok.text))
        if coord is None:
            raise DslError("unknown coordinate %r in %s" % (tok.text, context),
                           tok.line, tok.col)
        return coord

    def parse_d(self, tok: _Token) -> Form:
        self.expect("(")
        coord = self.parse_coordinate("d(...)")
        self.expect(")")
        space = self.model.space
        if coord.kind == "base":
            return fm.dx(space, coord.index)
        return fm.ingest_coordinate_basis(
            space, [(sp.Integer(1), (Dy(coord.index, coord.J),))],
            len(coord.J))

    def parse_multiindex(self, tok: _Token) -> MultiIndex:
        space = self.model.space
        entries = []
        self.expect("[")
        while self.peek().text != "]":
            etok = self.next()
            if etok.text == ",":
                continue
            if etok.kind != "name" or etok.text not in space.base_names:
                raise DslError("expected base coordinate in multi-index, "
                               "found %r" % (etok.text or "end"),
                               etok.line, etok.col)
            entries.append(space.base_names.index(etok.text) + 1)
        self.expect("]")
        if entries != sorted(entries):
            self.warnings.append(
                "line %d: multi-index %s canonicalized to sorted order"
                % (tok.line, entries))
        return MultiIndex(tuple(sorted(entries)))

    def parse_w(self, tok: _Token) -> Form:
        self.expect("(")
        space = self.model.space
        ftok = self.expect_name()
        if ftok.text not in space.fibre_names:
            raise DslError("unknown fibre coordinate %r" % ftok.text,
                           ftok.line, ftok.col)
        sigma = space.fibre_names.index(ftok.text) + 1
        J = MultiIndex()
        if self.peek().text == ",":
            self.next()
            J = self.parse_multiindex(tok)
        self.expect(")")
        return fm.omega(space, sigma, J)

    def parse_D(self, tok: _Token) -> _Value:
        if self._field_components is None:
            raise DslError("D(...) is only valid in field declarations",
                           tok.line, tok.col)
        self.expect("(")
        coord = self.parse_coordinate("D(...)")
        self.expect(")")
        if coord.kind == "fibre" and len(coord.J):
            raise DslError("field components attach to d/dx^i and "
                           "d/dy^sigma only", tok.line, tok.col)
        return _FieldDirection(coord)

    # value combination

    def combine_add(self, a: _Value, b: _Value, op: _Token) -> _Value:
        a = self.settle_field_term(a)
        if op_sign(op) < 0 and isinstance(b, (_FieldDirection, _FieldTerm)):
            if isinstance(b, _FieldDirection):
                b = _FieldTerm(b.coord, sp.Integer(-1))
            else:
                b = _FieldTerm(b.coord, -b.coeff)
            return self.settle_field_term(b)
        b = self.settle_field_term(b)
        if isinstance(a, _Scalar) and isinstance(b, _Scalar):
            return _Scalar(a.expr + op_sign(op) * b.expr)
        if isinstance(a, Form) and isinstance(b, Form):
            try:
                return a + op_sign(op) * b
            except ValueError as exc:
                raise DslError(str(exc), op.line, op.col) from exc
        # scalar 0 mixes with anything (e.g. "0 + w(q)")
        if isinstance(a, _Scalar) and a.expr == 0 and isinstance(b, Form):
            return op_sign(op) * b
        if isinstance(b, _Scalar) and b.expr == 0 and isinstance(a, Form):
            return a
        raise DslError("cannot add a scalar and a form", op.line, op.col)

    def combine_mul(self, a: _Value, b: _Value, op: _Token) -> _Value:
        if op.text == "/":
            if not isinstance(b, _Scalar):
                raise DslError("division by a form", op.line, op.col)
            if isinstance(a, _Scalar):
                return _Scalar(a.expr / b.expr)
            return a * (sp.Integer(1) / b.expr)
        if isinstance(a, (_FieldDirection, _FieldTerm)) \
                or isinstance(b, (_FieldDirection, _FieldTerm)):
            if isinstance(a, _Scalar):
                a, b = b, a
            if isinstance(b, _Scalar):
                if isinstance(a, _FieldDirection):
                    return _FieldTerm(a.coord, b.expr)
                return _FieldTerm(a.coord, a.coeff * b.expr)
            raise DslError("field terms are <scalar> * D(<coord>)",
                           op.line, op.col)
        if isinstance(a, _Scalar) and isinstance(b, _Scalar):
            return _Scalar(a.expr * b.expr)
        if isinstance(a, _Scalar):
            return b * a.expr
        if isinstance(b, _Scalar):
            return a * b.expr
        raise DslError("use ^ to multiply forms", op.line, op.col)

    def combine_wedge(self, a: _Value, b: _Value, op: _Token) -> _Value:
        if isinstance(a, _Scalar):
            a = fm.scalar_form(self.model.space, a.expr)
        if isinstance(b, _Scalar):
            b = fm.scalar_form(self.model.space, b.expr)
        if not isinstance(a, Form) or not isinstance(b, Form):
            raise DslError("wedge applies to forms", op.line, op.col)
        return fm.wedge(a, b)

    def settle_field_term(self, v: _Value) -> _Value:
        """Record a field term into the current field declaration."""
        if isinstance(v, _FieldDirection):
            v = _FieldTerm(v.coord, sp.Integer(1))
        if isinstance(v, _FieldTerm):
            xi, Xi = self._field_components
            coord = v.coord
            if coord.kind == "base":
                xi[coord.index] = xi.get(coord.index, sp.Integer(0)) + v.coeff
            else:
                Xi[coord.index] = Xi.get(coord.index, sp.Integer(0)) + v.coeff
            return _Scalar(sp.Integer(0))
        return v


class _FieldDirection:
    def __init__(self, coord: JetCoordinate) -> None:
        self.coord = coord


class _FieldTerm:
    def __init__(self, coord: JetCoordinate, coeff: sp.Expr) -> None:
        self.coord = coord
        self.coeff = coeff


def op_sign(op: _Token) -> int:
    return -1 if op.text == "-" else 1


def parse(text: str) -> ModelFile:
    """Parse model text into a :class:`ModelFile`."""
    parser = _Parser(text)
    model = parser.parse_model()
    return model


def parse_file(path: str) -> ModelFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())

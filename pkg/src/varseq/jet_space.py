"""Jet spaces over a trivially fibred manifold R^n x R^m -> R^n.

A fixed global chart is assumed throughout: base coordinates x^i
(i = 1..n), fibre coordinates y^sigma (sigma = 1..m), and the induced
jet coordinates y^sigma_J for canonical multi-indices J.  Multi-indices
are stored in non-decreasing order and carry no multiplicity weights;
every sum over |J| elsewhere in the package runs over canonical
multi-indices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import sympy as sp

__all__ = [
    "MultiIndex",
    "JetCoordinate",
    "JetSpace",
    "count_multiindices",
    "multiindices",
    "enumerate_coordinates",
]


@dataclass(frozen=True, order=True)
class MultiIndex:
    """A canonical (non-decreasing) symmetric multi-index over 1..n."""

    entries: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(not isinstance(i, int) or i < 1 for i in self.entries):
            raise ValueError("multi-index entries must be positive integers")
        if tuple(sorted(self.entries)) != self.entries:
            raise ValueError("multi-index entries must be non-decreasing")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def order(self) -> int:
        return len(self.entries)

    def append(self, i: int) -> "MultiIndex":
        """Canonical juxtaposition J -> Ji (sorted merge)."""
        if i < 1:
            raise ValueError("base index out of range: %r" % (i,))
        return MultiIndex(tuple(sorted(self.entries + (i,))))

    def drop_last(self) -> tuple["MultiIndex", int]:
        """Split J = K i with i the largest entry; requires |J| >= 1."""
        if not self.entries:
            raise ValueError("cannot split an empty multi-index")
        return MultiIndex(self.entries[:-1]), self.entries[-1]


@dataclass(frozen=True)
class JetCoordinate:
    """A base coordinate x^i or a jet coordinate y^sigma_J."""

    kind: str  # "base" or "fibre"
    index: int  # i for base, sigma for fibre
    J: MultiIndex = MultiIndex()

    def __post_init__(self) -> None:
        if self.kind not in ("base", "fibre"):
            raise ValueError("kind must be 'base' or 'fibre'")
        if self.kind == "base" and len(self.J):
            raise ValueError("base coordinates carry no multi-index")

    @property
    def order(self) -> int:
        return len(self.J) if self.kind == "fibre" else 0


def count_multiindices(n: int, k: int) -> int:
    """Number of canonical multi-indices of length k over 1..n."""
    if n < 1 or k < 0:
        raise ValueError("require n >= 1 and k >= 0")
    return math.comb(n + k - 1, k)


def multiindices(n: int, k: int) -> Iterator[MultiIndex]:
    """All canonical multi-indices of length k over 1..n, lexicographic."""
    for entries in itertools.combinations_with_replacement(range(1, n + 1), k):
        yield MultiIndex(entries)


class JetSpace:
    """The fibred manifold R^n x R^m -> R^n with named coordinates.

    Jet coordinate symbols are plain sympy symbols named
    ``<fibre>_<base letters>`` (for example ``q_tt`` or ``v_tx``); the
    space resolves symbols back to :class:`JetCoordinate` values.
    """

    def __init__(self, base_names: tuple[str, ...] | list[str],
                 fibre_names: tuple[str, ...] | list[str]) -> None:
        base_names = tuple(base_names)
        fibre_names = tuple(fibre_names)
        if len(base_names) < 1:
            raise ValueError("base dimension must be >= 1")
        if len(fibre_names) < 1:
            raise ValueError("fibre dimension must be >= 1")
        names = base_names + fibre_names
        if len(set(names)) != len(names):
            raise ValueError("coordinate names must be pairwise distinct")
        for name in names:
            if not name.isidentifier() or "_" in name:
                raise ValueError("coordinate names must be identifiers "
                                 "without underscores: %r" % (name,))
        self.base_names = base_names
        self.fibre_names = fibre_names
        self.n = len(base_names)
        self.m = len(fibre_names)
        self._symbols: dict[str, JetCoordinate] = {}

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, JetSpace)
                and self.base_names == other.base_names
                and self.fibre_names == other.fibre_names)

    def __hash__(self) -> int:
        return hash((self.base_names, self.fibre_names))

    def __repr__(self) -> str:
        return "JetSpace(base=%r, fibre=%r)" % (self.base_names,
                                                self.fibre_names)

    # symbol construction

    def base_symbol(self, i: int) -> sp.Symbol:
        if not 1 <= i <= self.n:
            raise ValueError("base index out of range: %r" % (i,))
        name = self.base_names[i - 1]
        self._symbols.setdefault(name, JetCoordinate("base", i))
        return sp.Symbol(name)

    def fibre_symbol(self, sigma: int, J: MultiIndex = MultiIndex()) -> sp.Symbol:
        if not 1 <= sigma <= self.m:
            raise ValueError("fibre index out of range: %r" % (sigma,))
        if any(i > self.n for i in J.entries):
            raise ValueError("multi-index entry out of range: %r" % (J,))
        name = self.fibre_names[sigma - 1]
        if len(J):
            name += "_" + "".join(self.base_names[i - 1] for i in J.entries)
        self._symbols.setdefault(name, JetCoordinate("fibre", sigma, J))
        return sp.Symbol(name)

    def symbol(self, coord: JetCoordinate) -> sp.Symbol:
        if coord.kind == "base":
            return self.base_symbol(coord.index)
        return self.fibre_symbol(coord.index, coord.J)

    # symbol resolution

    def coordinate_of(self, symbol: sp.Symbol) -> Optional[JetCoordinate]:
        """Resolve a symbol to a coordinate of this space, else None."""
        name = symbol.name if isinstance(symbol, sp.Symbol) else str(symbol)
        if name in self._symbols:
            return self._symbols[name]
        coord = self._parse_name(name)
        if coord is not None:
            self._symbols[name] = coord
        return coord

    def _parse_name(self, name: str) -> Optional[JetCoordinate]:
        if name in self.base_names:
            return JetCoordinate("base", self.base_names.index(name) + 1)
        if name in self.fibre_names:
            return JetCoordinate("fibre", self.fibre_names.index(name) + 1)
        if "_" not in name:
            return None
        head, _, tail = name.partition("_")
        if head not in self.fibre_names:
            return None
        sigma = self.fibre_names.index(head) + 1
        parses = self._parse_suffix(tail)
        if len(parses) != 1:
            return None
        return JetCoordinate("fibre", sigma,
                             MultiIndex(tuple(sorted(parses[0]))))

    def _parse_suffix(self, tail: str) -> list[tuple[int, ...]]:
        if tail == "":
            return [()]
        out = []
        for i, base in enumerate(self.base_names, start=1):
            if tail.startswith(base):
                out.extend((i,) + rest
                           for rest in self._parse_suffix(tail[len(base):]))
        return out

    def is_jet_symbol(self, symbol: sp.Symbol) -> bool:
        return self.coordinate_of(symbol) is not None

    def jet_order(self, expr: sp.Expr) -> int:
        """Highest jet order among coordinates appearing in expr."""
        order = 0
        for s in sp.sympify(expr).free_symbols:
            coord = self.coordinate_of(s)
            if coord is not None:
                order = max(order, coord.order)
        return order


def enumerate_coordinates(space: JetSpace, r: int) -> list[JetCoordinate]:
    """All coordinates on J^r Y, deterministically ordered.

    Order: base coordinates, then fibre coordinates by (|J|, sigma, J).
    """
    if r < 0:
        raise ValueError("order must be >= 0")
    coords = [JetCoordinate("base", i) for i in range(1, space.n + 1)]
    for k in range(r + 1):
        for sigma in range(1, space.m + 1):
            for J in multiindices(space.n, k):
                coords.append(JetCoordinate("fibre", sigma, J))
    return coords

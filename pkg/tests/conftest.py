import random

import pytest
import sympy as sp

from varseq.jet_space import JetSpace, enumerate_coordinates


@pytest.fixture
def mech():
    return JetSpace(("t",), ("q",))


@pytest.fixture
def mech2():
    return JetSpace(("t",), ("a", "b"))


@pytest.fixture
def field2():
    return JetSpace(("t", "x"), ("v", "w"))


def random_polynomial(space: JetSpace, order: int, rng: random.Random,
                      terms: int = 2, degree: int = 2) -> sp.Expr:
    """A small random polynomial in the coordinates of J^order."""
    symbols = [space.symbol(c) for c in enumerate_coordinates(space, order)]
    out = sp.Integer(0)
    for _ in range(terms):
        coeff = sp.Integer(rng.randint(-3, 3))
        monomial = coeff
        for _ in range(rng.randint(0, degree)):
            monomial *= rng.choice(symbols)
        out += monomial
    return out

"""Nambu-Goto string: momenta and Poincare Noether currents.

Keeps the Lagrangian opaque so the currents print in terms of momenta
p^i_mu = dL/dx^mu_i, then checks the contraction identities of the
explicit Minkowski momenta with the randomized probe.
"""

import sympy as sp

from varseq import JetSpace
from varseq import forms as fm
from varseq import probe
from varseq import prolong as pr
from varseq import symexpr
from varseq import variational as vr
from varseq.jet_space import MultiIndex
from varseq.render import form_text

space = JetSpace(("u", "v"), ("x0", "x1", "x2", "x3"))
T = sp.Symbol("T")
g = {0: 1, 1: -1, 2: -1, 3: -1}
Jdir = (MultiIndex((1,)), MultiIndex((2,)))


def xj(mu, i):
    return space.fibre_symbol(mu + 1, Jdir[i])


def x(mu):
    return space.fibre_symbol(mu + 1)


print("== Noether currents with an opaque Lagrangian ==")
slots = tuple(xj(mu, i) for mu in range(4) for i in (0, 1))
Lop = symexpr.opaque("L", *slots)
theta = vr.cartan_form(Lop * fm.omega0(space))

translations = [pr.ProjectableVectorField(space, {}, {mu + 1: sp.Integer(1)})
                for mu in range(4)]
boost = pr.ProjectableVectorField(space, {}, {1: x(1), 2: x(0)})
rotation = pr.ProjectableVectorField(space, {}, {2: x(2), 3: -x(1)})

for label, X in (("translation d/dx0", translations[0]),
                 ("boost x1 d/dx0 + x0 d/dx1", boost),
                 ("rotation x2 d/dx1 - x1 d/dx2", rotation)):
    Psi, _ = pr.noether_current(theta, X, check_lepage=False)
    print(label)
    print("  Psi =", form_text(Psi))

print()
print("== explicit Minkowski momenta, probed identities ==")
h = [[sum(g[mu] * xj(mu, i) * xj(mu, j) for mu in range(4))
      for j in (0, 1)] for i in (0, 1)]
D = sp.expand(h[0][0] * h[1][1] - h[0][1] * h[1][0])
L = -T * sp.sqrt(-D)
p = {(i, mu): sp.diff(L, xj(mu, i)) for i in (0, 1) for mu in range(4)}

cfg = probe.ProbeConfig(seed=7, trials=10, bound=9, tolerance=1e-9)


def accept(assignment):
    return D.subs(assignment) < 0


for i in (0, 1):
    lhs = sum(p[(i, mu)] * xj(mu, i) for mu in range(4))
    verdict = probe.exprs_equal_probabilistic(
        space, lhs, -T * sp.sqrt(-D), cfg, order=1, params=(T,),
        accept=accept)
    print("p^%d_mu x^mu_%d == -T sqrt(-D):" % (i, i), verdict.status)
    lhs = sum(p[(i, mu)] * xj(mu, 1 - i) for mu in range(4))
    verdict = probe.exprs_equal_probabilistic(
        space, lhs, sp.Integer(0), cfg, order=1, params=(T,), accept=accept)
    print("p^%d_mu x^mu_%d == 0:       " % (i, 1 - i), verdict.status)

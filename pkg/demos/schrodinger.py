"""The Schrodinger equation as an Euler-Lagrange form.

Writes the wave function as psi = v + i w and varies the real first-order
Lagrangian; the two components of the resulting source form are exactly
the real and imaginary parts of the Schrodinger equation.
"""

import sympy as sp

from varseq import JetSpace
from varseq import forms as fm
from varseq import variational as vr
from varseq.jet_space import MultiIndex
from varseq.render import form_text

space = JetSpace(("t", "x"), ("v", "w"))
hbar, m = sp.symbols("hbar m")
v, w = space.fibre_symbol(1), space.fibre_symbol(2)
vt, wt = (space.fibre_symbol(s, MultiIndex((1,))) for s in (1, 2))
vx, wx = (space.fibre_symbol(s, MultiIndex((2,))) for s in (1, 2))

L = -hbar**2 / (4 * m) * (vx**2 + wx**2) - hbar / 2 * (v * wt - w * vt)
lam = L * fm.omega0(space)
print("lambda   =", form_text(lam))

el = vr.euler_lagrange(lam).form
print("E_lambda =", form_text(el))
print()
print("The w(v) component is  hbar^2/(2m) v_xx - hbar w_t  and the w(w)")
print("component is  hbar^2/(2m) w_xx + hbar v_t : setting both to zero")
print("is  i hbar psi_t = -hbar^2/(2m) psi_xx  for psi = v + i w.")
print()
print("helmholtz =", form_text(vr.helmholtz(el).form))

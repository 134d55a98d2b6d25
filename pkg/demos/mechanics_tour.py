"""A tour of the variational sequence in mechanics.

Starts from the free-particle Lagrangian, computes the Euler-Lagrange
form, the Cartan form and its Noether energy current, and closes the
loop with the Tonti Lagrangian reconstructed from the equations alone.
"""

import sympy as sp

from varseq import JetSpace
from varseq import forms as fm
from varseq import prolong as pr
from varseq import variational as vr
from varseq.render import form_text

mech = JetSpace(("t",), ("q",))
m, k = sp.symbols("m k")
q, qt = sp.symbols("q q_t")

print("== harmonic oscillator ==")
lam = (m / 2 * qt**2 - k / 2 * q**2) * fm.dx(mech, 1)
print("lambda      =", form_text(lam))

eps = vr.euler_lagrange(lam).form
print("E_lambda    =", form_text(eps))
print("helmholtz   =", form_text(vr.helmholtz(eps).form), "(locally variational)")

theta = vr.cartan_form(lam)
print("theta       =", form_text(theta))
print("is_lepage   =", vr.is_lepage(theta))

print()
print("== Noether: time translation gives the energy ==")
time_shift = pr.ProjectableVectorField(mech, {1: sp.Integer(1)}, {})
current, _ = pr.noether_current(theta, time_shift)
print("current     =", form_text(current), " (minus the energy)")

print()
print("== the inverse problem: Tonti Lagrangian from the equations ==")
tonti = fm.horizontalize(vr.contact_homotopy(eps))
print("tonti       =", form_text(tonti))
el_again = vr.euler_lagrange(tonti).form
N = max(el_again.order, eps.order)
print("EL(tonti) == E_lambda:",
      fm.lift(el_again, N).equals(fm.lift(eps, N)))

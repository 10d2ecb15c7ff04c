"""Normal form of L3 with respect to L2 when L3^2 = 4 L2^3 - g2 L2 - g3.

L2 = d^2 + u with u(0) = t0, u'(0) = t1; L3 = 2 d^3 + 3 u d + (3/2) u'.
The curve constraint fixes g3 once t0, t1 and g2 are chosen.
"""
from fractions import Fraction

from commop.normalform import char_poly, evaluate_in_ring, normal_form, phi_hat, psi_matrix
from commop.opcore import XSeries, differential_operator, extend_stationary_kdv
from commop.schur import NormalizedDiffOp

t0, t1, g2 = Fraction(1), Fraction(2), Fraction(-1)
g3 = (2 * g2 * t0 - 2 * t0 ** 3 - t1 ** 2) / 4
print(f"g2 = {g2}, g3 = {g3}")

u = extend_stationary_kdv(t0, t1, g2 - 3 * t0 ** 2, 12)
L2 = NormalizedDiffOp(2, {0: u})
L3 = differential_operator({3: XSeries({0: 2}), 1: u * XSeries({0: 3}),
                            0: u.derivative() * XSeries({0: Fraction(3, 2)})}, 2)

L3p = normal_form(L3, L2, 5)
print("L3' =", L3p.to_text())
print("Phi(L3') =", phi_hat(L3p).to_text())

M = psi_matrix(phi_hat(L3p))
print(M.to_text())
f = char_poly(M)
print("curve:", f.to_text(), "= 0")

# the same polynomial kills L3' inside the operator ring
print("f(L3', d^2) == 0:", evaluate_in_ring(f, L3p, 2).is_zero())

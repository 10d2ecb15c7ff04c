"""Walk a commuting pair of orders 2 and 3 through the whole pipeline.

Q = d^2 + u and P = 4 d^3 + 6 u d + 3 u' commute exactly when
6 u u' + u''' = 0, so u is fixed by three Taylor coefficients.
"""
from fractions import Fraction

from commop.normalform import (char_poly, diagonalize_in_ek, normal_form, normalize_nf,
                               phi_hat, psi_matrix)
from commop.opcore import XSeries, differential_operator, extend_stationary_kdv
from commop.schur import NormalizedDiffOp, schur_operator

u0, u1, u2 = Fraction(1), Fraction(2), Fraction(3)

# u as a power series, known modulo x^13
u = extend_stationary_kdv(u0, u1, u2, 12)
print("u =", u.to_text())

Q = NormalizedDiffOp(2, {0: u})
P = differential_operator({3: XSeries({0: 4}), 1: u * XSeries({0: 6}),
                           0: u.derivative() * XSeries({0: 3})}, 2)

# S^-1 Q S = d^2; S starts 1 + 0 + ...
S = schur_operator(Q, 5)
print("S =", S.base.to_text())

# conjugating P by the same S gives a finite operator commuting with d^2
Pp = normal_form(P, Q, 5)
print("P' =", Pp.to_text())

N = normalize_nf(Pp, 2)
print("coordinates:")
print(N.coordinates_text())

# vector picture, then a 2x2 matrix over Q[W, 1/W] with W = D~^2
V = phi_hat(Pp)
print("Phi(P') =", V.to_text())
M = psi_matrix(V)
print("matrix =", M.to_text())

# det(M - lambda) is the curve relating P and Q
print("curve:", char_poly(M).to_text(), "= 0")

# coefficients of P' can also be made constant along D~-orbits
_, D = diagonalize_in_ek(V, 6)
print("diagonal form =", D.to_text())

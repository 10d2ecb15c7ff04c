"""Fixture builders shared by the test modules."""
from __future__ import annotations

import random
from fractions import Fraction as F

from commop.hcpc import HcpForm
from commop.opcore import TruncatedOp, XSeries, differential_operator, extend_stationary_kdv
from commop.scalar import cyc_power_of_xi, solve_linear, zero
from commop.schur import NormalizedDiffOp


def wallenberg(u0, u1, u2, n=12):
    """(Q, P) with Q = d^2 + u and P = 4 d^3 + 6 u d + 3 u', u from the stationary KdV flow."""
    u = extend_stationary_kdv(F(u0), F(u1), F(u2), n)
    Q = NormalizedDiffOp(2, {0: u})
    P = differential_operator({3: XSeries({0: 4}), 1: u * XSeries({0: 6}),
                               0: u.derivative() * XSeries({0: 3})}, 2)
    return Q, P


def weierstrass(t0, t1, g2, n=12):
    """(Q, L3, g3) with L3 = 2 d^3 + 3 u d + (3/2) u'; g3 from the curve constraint."""
    t0, t1, g2 = F(t0), F(t1), F(g2)
    g3 = (2 * g2 * t0 - 2 * t0 ** 3 - t1 ** 2) / 4
    u = extend_stationary_kdv(t0, t1, g2 - 3 * t0 ** 2, n)
    Q = NormalizedDiffOp(2, {0: u})
    L3 = differential_operator({3: XSeries({0: 2}), 1: u * XSeries({0: 3}),
                                0: u.derivative() * XSeries({0: F(3, 2)})}, 2)
    return Q, L3, g3


def airy():
    return NormalizedDiffOp(2, {0: XSeries({1: 1})})


def wallenberg_closed_form(u0, u1, u2, a1_sign=1):
    """4 d^3 + 2 u0 A_1 d + s u1 A_1 + ((2 u0^2 + u2)/2)(-1 + A_1) int, s = a1_sign."""
    u0, u1, u2 = F(u0), F(u1), F(u2)
    c = (2 * u0 ** 2 + u2) / 2
    return TruncatedOp(2, {
        3: HcpForm.monomial(2, 3, 4),
        1: HcpForm(2, 1, {(1, 0): 2 * u0}),
        0: HcpForm(2, 0, {(1, 0): a1_sign * u1}),
        -1: HcpForm(2, -1, {(0, 0): -c, (1, 0): c}),
    })


def random_fraction(rng: random.Random, height=5):
    return F(rng.randint(-height, height), rng.randint(1, height))


def random_monomial(rng: random.Random, k, max_order=3, max_gamma=3, with_b=True):
    """A single G-form monomial G_l A_i D^r or B_j D^r."""
    r = rng.randint(-max_order, max_order)
    if with_b and rng.random() < 0.25:
        j = rng.randint(max(1, -r + 1), max(1, -r + 1) + 3)
        return HcpForm.b_monomial(k, r, j, random_fraction(rng))
    return HcpForm(k, r, {(rng.randrange(k), rng.randint(0, max_gamma)): random_fraction(rng)})


def random_differential(rng: random.Random, order, k=1, xdeg=3, lead=None):
    """Random differential operator with polynomial coefficients and constant symbol."""
    coeffs = {order: XSeries({0: lead if lead is not None else rng.choice([1, 2, F(1, 3), -1])})}
    for b in range(order):
        coeffs[b] = XSeries({d: random_fraction(rng) for d in range(xdeg + 1) if rng.random() < 0.6})
    return differential_operator(coeffs, k)


def random_totally_free(rng, k, order, max_gamma=3):
    """Random element of the solution space of the freeness equations."""
    keys = [(i, m) for i in range(k) for m in range(max_gamma + 1)]
    if order >= 0:
        return HcpForm(k, order, {key: random_fraction(rng) for key in rng.sample(keys, 3)})
    rows = [[cyc_power_of_xi(k, i * (j - 1)) * ((j - 1) ** m) for i, m in keys]
            for j in range(1, -order + 1)]
    _, kernel = solve_linear(rows, [0] * len(rows), k)
    vec = [zero(k)] * len(keys)
    for basis in rng.sample(kernel, min(3, len(kernel))):
        c = random_fraction(rng)
        vec = [v + b * c for v, b in zip(vec, basis)]
    return HcpForm(k, order, dict(zip(keys, vec)))

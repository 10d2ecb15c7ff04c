"""Acceptance suite: one test (or a few parts) per criterion, each under 30 s.

The per-criterion pass/fail lines are printed in the terminal summary by
conftest.py.
"""
import random
from fractions import Fraction as F
from math import comb, factorial

import pytest

from commop.cli import evaluate, main, parse_operator
from commop.errors import NonCommuting
from commop.hcpc import HcpForm, kernel_basis, mono_mul
from commop.normalform import (BiPoly, MatrixFormOp, VectorFormOp, char_poly, companion,
                               conjugate_in_centralizer, evaluate_at_matrix, normal_form,
                               normalize_nf, phi_hat, psi_matrix)
from commop.opcore import (CanonicalComponent, TruncatedOp, XSeries, canon_mul, differential_operator,
                           dpow, hcp_to_canonical, make_generator, op_apply)
from commop.scalar import CycVector, cyc_power_of_xi
from commop.schur import condition_aq, is_differential, schur_operator

from helpers import (airy, random_differential, random_fraction, random_monomial,
                     random_totally_free, wallenberg, wallenberg_closed_form, weierstrass)

criterion = pytest.mark.criterion
TRIPLES = [(1, 2, 3), (F(1, 2), -1, F(2, 3)), (-2, F(3, 4), 5)]


def published_matrix(u0, u1, u2):
    """[[u1, 2(2W + u0)], [4W^2 - 2 u0 W - 2 u0^2 - u2, -u1]] with W = D~^2."""
    u0, u1, u2 = F(u0), F(u1), F(u2)
    return MatrixFormOp(2, [[{0: u1}, {1: 4, 0: 2 * u0}],
                            [{2: 4, 1: -2 * u0, 0: -2 * u0 ** 2 - u2}, {0: -u1}]])


def published_curve(u0, u1, u2):
    """lambda^2 - (16 W^3 + 4(-3 u0^2 - u2) W - 4 u0^3 + u1^2 - 2 u0 u2)."""
    u0, u1, u2 = F(u0), F(u1), F(u2)
    return BiPoly({(2, 0): 1, (0, 3): -16, (0, 1): -4 * (-3 * u0 ** 2 - u2),
                   (0, 0): -(-4 * u0 ** 3 + u1 ** 2 - 2 * u0 * u2)})


def cli_wallenberg(capsys, command, u0, u1, u2, n=9):
    assert main(["kdv-series", str(u0), str(u1), str(u2), str(n)]) == 0
    u = capsys.readouterr().out.splitlines()[0]
    argv = [command, f"4 d^3 + 3 ({u}) d + 3 d ({u})", f"d^2 + ({u})", "--k", "2", "--xprec", str(n + 1)]
    code = main(argv)
    return code, capsys.readouterr().out.strip()


# ---------------------------------------------------------------------------
# 1. Wallenberg golden values

@criterion(1, "normal form")
@pytest.mark.parametrize("triple", TRIPLES)
def test_c1_wallenberg_normal_form(triple, capsys):
    expected = wallenberg_closed_form(*triple)
    Q, P = wallenberg(*triple)
    assert normal_form(P, Q, 5) == expected
    if triple == (1, 2, 3):
        code, out = cli_wallenberg(capsys, "normal-form", *triple)
        assert code == 0 and evaluate(parse_operator(out), 2) == expected


@criterion(1, "matrix")
@pytest.mark.parametrize("triple", TRIPLES)
def test_c1_wallenberg_matrix(triple):
    Q, P = wallenberg(*triple)
    assert psi_matrix(phi_hat(normal_form(P, Q, 5))) == published_matrix(*triple)


@criterion(1, "bc-poly")
@pytest.mark.parametrize("triple", TRIPLES)
def test_c1_wallenberg_curve(triple, capsys):
    Q, P = wallenberg(*triple)
    f = char_poly(psi_matrix(phi_hat(normal_form(P, Q, 5))))
    assert f == published_curve(*triple)
    if triple == (1, 2, 3):
        code, out = cli_wallenberg(capsys, "bc-poly", *triple)
        assert (code, out) == (0, published_curve(*triple).to_text())
        assert out == "lambda^2 - 16 W^3 + 24 W + 6"


# ---------------------------------------------------------------------------
# 2. Weierstrass golden values

@criterion(2, "all")
def test_c2_weierstrass():
    t0, t1, g2 = F(1), F(2), F(-1)
    Q, L3, g3 = weierstrass(t0, t1, g2)
    assert -2 * g2 * t0 + 4 * g3 + 2 * t0 ** 3 + t1 ** 2 == 0
    V = phi_hat(normal_form(L3, Q, 5))
    # 2 D~^3 + t0 A_1 D~ - (t1/2) A_1 - (1/4)(1 - A_1)(g2 - t0^2) D~^-1, with Phi(A_1) = (1, -1)
    published = VectorFormOp(2, {3: CycVector(2, [2, 2]), 1: CycVector(2, [t0, -t0]),
                                 0: CycVector(2, [-t1 / 2, t1 / 2]),
                                 -1: CycVector(2, [0, -(g2 - t0 ** 2) / 2])})
    assert V == published
    M = psi_matrix(V)
    assert M == MatrixFormOp(2, [[{0: -t1 / 2}, {1: 2, 0: t0}],
                                 [{2: 2, 1: -t0, 0: (-g2 + t0 ** 2) / 2}, {0: t1 / 2}]])
    assert char_poly(M) == BiPoly({(2, 0): 1, (0, 3): -4, (0, 1): g2, (0, 0): g3})


# ---------------------------------------------------------------------------
# 3. basic identities, checked by exact HCP arithmetic and by canonical series

CAP = 14


def gen(kind, k, index=0):
    return make_generator(kind, k=k, index=index)


def D(k, n):
    return dpow(k, n)


def as_series(op):
    return TruncatedOp(op.k, {m: hcp_to_canonical(c, CAP) for m, c in op.components.items()})


def evaluate_expr(expr, k, series):
    """expr is a list of (coefficient, [factor ops]); products are left to right."""
    total = TruncatedOp(k, {})
    for coef, factors in expr:
        prod = TruncatedOp.scalar(k, 1)
        if series:
            prod = as_series(prod)
        for f in factors:
            prod = prod * (as_series(f) if series else f)
        total = total + prod.scale(coef)
    return total


def series_agree(a, b):
    orders = set(a.components) | set(b.components)
    for m in orders:
        x, y = a[m], b[m]
        x = x if isinstance(x, CanonicalComponent) else hcp_to_canonical(x, CAP)
        y = y if isinstance(y, CanonicalComponent) else hcp_to_canonical(y, CAP)
        assert min(x.known_to, y.known_to) >= 6
        if not x.agrees_with(y):
            return False
    return True


def identity_instances(k):
    xi = lambda e: cyc_power_of_xi(k, e)
    one = TruncatedOp.scalar(k, 1)
    for i in range(k):
        for j in range(1, 6):
            A, B = gen("a", k, i), gen("b", k, j)
            yield "A_i B_j", [(1, [A, B])], [(xi(i * (j - 1)), [B])]
            yield "B_j A_i", [(1, [B, A])], [(xi(i * (j - 1)), [B])]
    for m in range(6):
        x_m = gen("x", k) ** m
        yield "int x^m delta", [(1, [gen("int", k), x_m, gen("delta", k)])], \
            [(F(1, m + 1), [gen("x", k) ** (m + 1), gen("delta", k)])]
    for m in range(1, 6):
        yield "int^m d^m", [(1, [D(k, -m), D(k, m)])], \
            [(1, [one])] + [(-1, [gen("b", k, j)]) for j in range(1, m + 1)]
    rng = random.Random(k)
    for u in range(1, 6):
        for _ in range(2):
            f = XSeries({d: random_fraction(rng) for d in range(rng.randint(0, 3) + 1)})
            rhs = [(1, [differential_operator({0: f}, k), D(k, -u)])]
            g, l = f, 0
            while True:
                l += 1
                g = g.derivative()
                if not g.coeffs:
                    break
                binom = F(1)
                for t in range(l):
                    binom *= F(-u - t, t + 1)
                rhs.append((binom, [differential_operator({0: g}, k), D(k, -u - l)]))
            yield "int^u f", [(1, [D(k, -u), differential_operator({0: f}, k)])], rhs
    for i in range(1, 6):
        for j in range(1, 6):
            yield "B_i B_j", [(1, [gen("b", k, i), gen("b", k, j)])], [(1, [gen("b", k, j)])] if i == j else []
    for i in range(k):
        for j in range(6):
            yield "A_i G_j", [(1, [gen("a", k, i), gen("gamma", k, j)])], [(1, [gen("gamma", k, j), gen("a", k, i)])]
    for i in range(-5, 6):
        for j in range(6):
            rhs = [(comb(j, l) * i ** (j - l), [gen("gamma", k, l), D(k, i)]) for l in range(j + 1)]
            yield "D^i G_j", [(1, [D(k, i), gen("gamma", k, j)])], rhs
    for i in range(6):
        for j in range(6):
            rhs = [(comb(j, l) * i ** (j - l), [gen("x", k) ** i, gen("gamma", k, l)]) for l in range(j + 1)]
            yield "G_j x^i", [(1, [gen("gamma", k, j), gen("x", k) ** i])], rhs
    for i in range(6):
        for j in range(1, 6):
            yield "G_i B_j", [(1, [gen("gamma", k, i), gen("b", k, j)])], [((j - 1) ** i, [gen("b", k, j)])]
            yield "B_j G_i", [(1, [gen("b", k, j), gen("gamma", k, i)])], [((j - 1) ** i, [gen("b", k, j)])]
    for u in range(-5, 6):
        for j in range(1, 6):
            yield "D^u B_j", [(1, [D(k, u), gen("b", k, j)])], [(1, [gen("b", k, j - u), D(k, u)])]
    yield "d int", [(1, [D(k, 1), D(k, -1)])], [(1, [one])]
    yield "int d", [(1, [D(k, -1), D(k, 1)])], [(1, [one]), (-1, [gen("delta", k)])]


@criterion(3, "identities")
@pytest.mark.parametrize("k", [2, 3, 4])
def test_c3_basic_identities(k):
    count = 0
    for name, lhs, rhs in identity_instances(k):
        left, right = evaluate_expr(lhs, k, False), evaluate_expr(rhs, k, False)
        assert left == right, name
        assert series_agree(evaluate_expr(lhs, k, True), evaluate_expr(rhs, k, True)), name
        count += 1
    assert count >= 200


@criterion(3, "full int x^m series")
def test_c3_integral_of_monomial_series():
    for k in (2, 3, 4):
        for m in range(6):
            prod = gen("int", k) * gen("x", k) ** m
            expected = CanonicalComponent(-(m + 1), {m + i + 1: F((-1) ** i * factorial(m), factorial(m + i + 1))
                                                     for i in range(CAP)}, CAP)
            assert hcp_to_canonical(prod[-(m + 1)], CAP).agrees_with(expected)
            assert set(prod.components) == {-(m + 1)}


@criterion(3, "actions")
def test_c3_actions():
    rng = random.Random(3)
    for k in (2, 3, 4):
        for _ in range(10):
            f = XSeries({d: random_fraction(rng) for d in range(6)})
            fx = differential_operator({0: f}, k)
            # delta o f = f(0) delta, and delta acts as evaluation at 0
            assert gen("delta", k) * fx == gen("delta", k).scale(f[0])
            assert op_apply(gen("delta", k), f).coeffs == ({0: f[0]} if f[0] else {})
        for m in range(6):
            assert op_apply(gen("int", k), XSeries({m: 1})).coeffs == {m + 1: F(1, m + 1)}


# ---------------------------------------------------------------------------
# 4. HCP products against the canonical-series multiplier

@criterion(4, "500 products")
def test_c4_products_against_series():
    rng = random.Random(4)
    cap = 10
    for _ in range(500):
        k = rng.choice([2, 3])
        H, M = random_monomial(rng, k), random_monomial(rng, k)
        prod = mono_mul(H, M)
        wide = cap + abs(H.order) + abs(M.order) + 4
        series = canon_mul(hcp_to_canonical(H, wide), hcp_to_canonical(M, wide))
        got = hcp_to_canonical(prod[H.order + M.order], cap)
        assert series.agrees_with(got, cap=cap)
        assert series.known_to >= cap


# ---------------------------------------------------------------------------
# 5. Schur operator residual and bounds

@criterion(5, "residual and bounds")
@pytest.mark.parametrize("name", ["wallenberg", "airy"])
def test_c5_schur(name):
    Q = wallenberg(1, 2, 3)[0] if name == "wallenberg" else airy()
    depth = 8
    S = schur_operator(Q, depth)
    dq = TruncatedOp(2, {2: HcpForm.monomial(2, 2)})
    R = Q.operator(2) * S.base - S.base * dq
    assert R.floor <= 2 - depth
    assert all(R[m].is_zero() for m in range(2 - depth, 3))
    for m, comp in S.base.components.items():
        assert not comp.b
        if m < 0:
            t = -m
            deg = comp.sdeg_a()
            assert t / 2 - 1 < deg < t
    assert set(S.base.components) >= {0}
    assert S.base[-1].is_zero()


# ---------------------------------------------------------------------------
# 6. differential-operator criterion

@criterion(6, "differential pass")
def test_c6_differential_operators_pass():
    rng = random.Random(6)
    for _ in range(100):
        k = rng.choice([1, 2, 3])
        P = random_differential(rng, rng.randint(1, 4), k=k, xdeg=rng.randint(0, 3))
        assert is_differential(P, max(k, 2))


@criterion(6, "non-differential fail with clause")
def test_c6_non_differential_operators_fail():
    rng = random.Random(60)
    for n in range(100):
        k = rng.choice([2, 3])
        order = rng.randint(1, 3)
        P = random_differential(rng, order, k=k, xdeg=2)
        c = random_fraction(rng) or F(1)
        kind = n % 3
        if kind == 0:
            j = rng.randint(1, 3)
            P = P + dpow(k, -j, c)
            expected = (2, -j)
        elif kind == 1:
            m = rng.randint(0, order - 1)
            i = rng.randint(1, k - 1)
            P = P + TruncatedOp(k, {m: HcpForm(k, m, {(i, 0): c})})
            expected = ("A", m)
        else:
            i = rng.randint(1, k - 1)
            P = P + TruncatedOp(k, {order: HcpForm(k, order, {(i, 0): c})})
            expected = (4, order)
        res = is_differential(P, k)
        assert not res
        assert (res.clause, res.order) == expected


@criterion(6, "normal forms satisfy A_q(0)")
def test_c6_normal_forms_satisfy_condition():
    for triple in TRIPLES:
        Q, P = wallenberg(*triple)
        assert condition_aq(normal_form(P, Q, 5), 2, 0)
    Q, L3, _ = weierstrass(1, 2, -1)
    assert condition_aq(normal_form(L3, Q, 5), 2, 0)


# ---------------------------------------------------------------------------
# 7. uniqueness of the normalized form

@criterion(7, "20 conjugates")
def test_c7_normalization_uniqueness():
    Q, P = wallenberg(1, 2, 3)
    Pp = normal_form(P, Q, 5)
    ref = normalize_nf(Pp, 2).coordinates_text()
    (K,) = kernel_basis(2, -1)
    rng = random.Random(7)
    seen = set()
    while len(seen) < 20:
        s = random_fraction(rng, 9)
        if s == 0 or s in seen:
            continue
        seen.add(s)
        # S_0 = 1 fixes the order-0 part of the conjugator up to a scalar, which cancels
        C = TruncatedOp(2, {0: HcpForm.monomial(2, 0), -1: K.scale(s)})
        X = conjugate_in_centralizer(Pp, C, 2)
        assert X != Pp
        assert normalize_nf(X, 2).coordinates_text() == ref


# ---------------------------------------------------------------------------
# 8. homomorphisms

def random_vector_form(rng, k):
    return VectorFormOp(k, {l: CycVector(k, [random_fraction(rng) for _ in range(k)])
                            for l in range(-2, 3) if rng.random() < 0.6})


@criterion(8, "Phi-hat multiplicative")
def test_c8_phi_hat():
    rng = random.Random(8)
    for _ in range(200):
        k = rng.choice([2, 3])
        H = TruncatedOp(k, {(h := random_totally_free(rng, k, rng.randint(-2, 2))).order: h})
        M = TruncatedOp(k, {(m := random_totally_free(rng, k, rng.randint(-2, 2))).order: m})
        assert phi_hat(H * M) == phi_hat(H) * phi_hat(M)


@criterion(8, "psi multiplicative")
def test_c8_psi():
    rng = random.Random(80)
    for _ in range(200):
        k = rng.choice([2, 3, 4])
        V, W = random_vector_form(rng, k), random_vector_form(rng, k)
        assert psi_matrix(V * W) == psi_matrix(V) * psi_matrix(W)


@criterion(8, "psi(D~)^k = W")
@pytest.mark.parametrize("k", [2, 3, 4])
def test_c8_shift_power(k):
    T = psi_matrix(VectorFormOp(k, {1: CycVector.constant(k, 1)}))
    assert T == companion(k)
    assert T ** k == MatrixFormOp.identity(k, 1)


@criterion(8, "Cayley-Hamilton")
def test_c8_cayley_hamilton():
    Q, P = wallenberg(1, 2, 3)
    Q2, L3, _ = weierstrass(1, 2, -1)
    for M in (psi_matrix(phi_hat(normal_form(P, Q, 5))), psi_matrix(phi_hat(normal_form(L3, Q2, 5)))):
        assert evaluate_at_matrix(char_poly(M), M).is_zero()


# ---------------------------------------------------------------------------
# 9. non-commuting detection

def airy_pair():
    x = XSeries({1: 1})
    return differential_operator({3: XSeries({0: 1}), 1: x}, 2), airy()


@criterion(9, "NonCommuting and exit 2")
def test_c9_non_commuting_detected(capsys):
    P, Q = airy_pair()
    with pytest.raises(NonCommuting):
        normal_form(P, Q, 6)
    assert main(["normal-form", "d^3 + x d", "d^2 + x"]) == 2
    assert "NonCommuting" in capsys.readouterr().err


@criterion(9, "component below -q+1")
def test_c9_reports_component_below_floor():
    P, Q = airy_pair()
    with pytest.raises(NonCommuting) as info:
        normal_form(P, Q, 8)
    assert info.value.order < -Q.q + 1

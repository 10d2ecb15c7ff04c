from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from commop.errors import DivisionByZero, IndexMismatch
from commop.scalar import (CycScalar, CycVector, as_scalar, cyc_arith, cyc_power_of_xi,
                           cyclotomic_poly, one, solve_linear, zero)

KS = [1, 2, 3, 4, 6]
fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def scalars(k):
    return st.lists(fractions, min_size=k, max_size=k).map(lambda cs: CycScalar(k, cs))


@pytest.mark.parametrize("k", range(1, 25))
def test_cyclotomic_matches_sympy(k):
    t = sympy.Symbol("t")
    expected = tuple(int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(k, t), t).all_coeffs()))
    assert cyclotomic_poly(k) == expected


def test_cyclotomic_small_cases():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(2) == (1, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)


def test_root_relations():
    z2 = cyc_power_of_xi(2, 1)
    assert z2 * z2 == 1
    z3 = cyc_power_of_xi(3, 1)
    assert z3 + z3 * z3 == -1
    z4 = cyc_power_of_xi(4, 1)
    assert 1 / (1 + z4) == (1 - z4) / 2
    assert (1 / (1 + z4)).to_text() == "(1/2 - 1/2 zeta)"


def test_power_of_xi_examples():
    assert cyc_power_of_xi(2, 3) == -1
    assert cyc_power_of_xi(4, 2) == -1
    assert cyc_power_of_xi(3, -1) == cyc_power_of_xi(3, 2)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6, 8, 12])
def test_roots_of_unity_rebuild_cyclotomic(k):
    for e in range(-2 * k, 2 * k):
        assert cyc_power_of_xi(k, e) ** k == 1
    # prod over primitive e of (t - zeta^e), as coefficient lists over Q(zeta)
    poly = [one(k)]
    for e in range(1, k + 1):
        if sympy.gcd(e, k) != 1:
            continue
        root = cyc_power_of_xi(k, e)
        nxt = [zero(k)] * (len(poly) + 1)
        for d, c in enumerate(poly):
            nxt[d + 1] = nxt[d + 1] + c
            nxt[d] = nxt[d] - c * root
        poly = nxt
    assert tuple(poly) == tuple(as_scalar(c, k) for c in cyclotomic_poly(k))


@pytest.mark.parametrize("k", KS)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_field_axioms(k, data):
    a, b, c = (data.draw(scalars(k)) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == zero(k)
    if not a.is_zero():
        assert a * a.inverse() == one(k)
        assert (b / a) * a == b


@given(fractions, fractions, fractions, fractions)
def test_rational_embedding_is_exact(a, b, c, d):
    x, y = CycScalar.rational(a, 3), CycScalar.rational(c, 3)
    assert (x + y).to_fraction() == a + c
    assert (x * y).to_fraction() == a * c


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        one(3) / zero(3)
    with pytest.raises(ZeroDivisionError):
        zero(2).inverse()


def test_mixed_index_arithmetic():
    with pytest.raises(IndexMismatch):
        cyc_arith(cyc_power_of_xi(3, 1), cyc_power_of_xi(4, 1), "+")
    with pytest.raises(IndexMismatch):
        cyc_arith(as_scalar(F(1, 2), 1), cyc_power_of_xi(3, 1), "+")
    # the operators embed rational values into any k
    assert as_scalar(F(1, 2), 1) + cyc_power_of_xi(3, 1) == cyc_power_of_xi(3, 1) + F(1, 2)


def test_text_rendering():
    assert as_scalar(F(3, 2)).to_text() == "3/2"
    assert as_scalar(-4).to_text() == "-4"


def test_vector_shift_and_ops():
    v = CycVector(3, [1, 2, 3])
    assert v.shift(1) == CycVector(3, [2, 3, 1])
    assert (v * v) == CycVector(3, [1, 4, 9])
    assert (v - v).is_zero()


def test_solve_linear_particular_and_kernel():
    rows = [[1, 1, 0], [0, 0, 1]]
    sol, kernel = solve_linear(rows, [2, 3], 1)
    assert len(kernel) == 1
    for r, rhs in zip(rows, [2, 3]):
        assert sum(as_scalar(a) * x for a, x in zip(r, sol)) == rhs
        assert sum(as_scalar(a) * x for a, x in zip(r, kernel[0])) == 0
    with pytest.raises(ValueError):
        solve_linear([[1, 1], [1, 1]], [1, 2], 1)

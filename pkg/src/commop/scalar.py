"""Exact scalars: rationals and the cyclotomic fields Q(zeta_k).

Elements of Q(zeta_k) are stored as coefficient tuples of a polynomial in
zeta of degree < phi(k), reduced modulo the k-th cyclotomic polynomial.
Elements with ``k == 1`` are plain rationals and mix freely with any k.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import DivisionByZero, IndexMismatch

Rational = Fraction


# ---------------------------------------------------------------------------
# univariate polynomials over Q, as tuples of Fractions (low degree first)

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _psub(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _pdivmod(a, b):
    a = [Fraction(c) for c in _trim(a)]
    b = _trim(b)
    if not b:
        raise DivisionByZero("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        s = len(a) - len(b)
        q[s] = c
        for i, y in enumerate(b):
            a[s + i] -= c * y
        a = _trim(a)
    return _trim(q), a


@lru_cache(maxsize=None)
def cyclotomic_poly(k: int) -> tuple:
    """Integer coefficients of Phi_k, lowest degree first."""
    if k < 1:
        raise ValueError("k must be positive")
    num = [Fraction(-1)] + [Fraction(0)] * (k - 1) + [Fraction(1)]
    for d in range(1, k):
        if k % d == 0:
            num, rem = _pdivmod(num, cyclotomic_poly(d))
            assert not rem
    return tuple(int(c) for c in num)


@lru_cache(maxsize=None)
def _degree(k):
    return len(cyclotomic_poly(k)) - 1


@lru_cache(maxsize=None)
def _reduction_table(k):
    # t^e mod Phi_k for e < 2*phi(k), as coefficient lists
    phi = cyclotomic_poly(k)
    n = len(phi) - 1
    table = []
    cur = [Fraction(0)] * n
    if n:
        cur[0] = Fraction(1)
    for e in range(2 * n):
        table.append(tuple(cur))
        # multiply by t
        top = cur[-1] if n else 0
        cur = [Fraction(0)] + cur[:-1]
        if top:
            cur = [c - top * phi[i] for i, c in enumerate(cur)]
    return table


def _reduce(k, poly):
    n = _degree(k)
    if len(poly) <= n:
        return tuple(Fraction(c) for c in poly) + (Fraction(0),) * (n - len(poly))
    if len(poly) <= 2 * n:
        table = _reduction_table(k)
        out = [Fraction(0)] * n
        for e, c in enumerate(poly):
            if c:
                for i, t in enumerate(table[e]):
                    if t:
                        out[i] += c * t
        return tuple(out)
    _, r = _pdivmod(poly, cyclotomic_poly(k))
    return tuple(r) + (Fraction(0),) * (n - len(r))


class CycScalar:
    """An exact element of Q(zeta_k)."""

    __slots__ = ("k", "coeffs", "_hash")

    def __init__(self, k, coeffs):
        self.k = k
        self.coeffs = _reduce(k, list(coeffs))
        self._hash = None

    @classmethod
    def _raw(cls, k, coeffs):
        obj = cls.__new__(cls)
        obj.k = k
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, value, k=1):
        n = _degree(k)
        return cls._raw(k, (Fraction(value),) + (Fraction(0),) * (n - 1))

    # -- coercion ----------------------------------------------------------
    def _common(self, other):
        if isinstance(other, CycScalar):
            if other.k == self.k:
                return self, other
            # rationals embed in every cyclotomic field
            if other.is_rational():
                return self, other.with_k(self.k)
            if self.is_rational():
                return self.with_k(other.k), other
            raise IndexMismatch(f"cyclotomic index mismatch: {self.k} vs {other.k}")
        if isinstance(other, (int, Fraction)):
            return self, CycScalar.rational(other, self.k)
        return NotImplemented, NotImplemented

    def with_k(self, k):
        if k == self.k:
            return self
        if not self.is_rational():
            raise IndexMismatch(f"cannot move a non-rational element of Q(zeta_{self.k}) to k={k}")
        return CycScalar.rational(self.coeffs[0], k)

    def is_rational(self):
        return all(c == 0 for c in self.coeffs[1:])

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def to_fraction(self):
        if not self.is_rational():
            raise ValueError("not a rational element")
        return self.coeffs[0]

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        a, b = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        return CycScalar._raw(a.k, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycScalar._raw(self.k, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        a, b = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        return CycScalar._raw(a.k, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycScalar._raw(self.k, tuple(x * other for x in self.coeffs))
        a, b = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        if len(a.coeffs) == 1:
            return CycScalar._raw(a.k, (a.coeffs[0] * b.coeffs[0],))
        return CycScalar._raw(a.k, _reduce(a.k, _pmul(a.coeffs, b.coeffs)))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("division by zero in Q(zeta_k)")
        if len(self.coeffs) == 1:
            return CycScalar._raw(self.k, (1 / self.coeffs[0],))
        # extended Euclid: find s with s*self = 1 mod Phi_k
        r0, r1 = [Fraction(c) for c in cyclotomic_poly(self.k)], _trim(self.coeffs)
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1))
        c = r1[0]
        return CycScalar(self.k, [x / c for x in s1])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return CycScalar._raw(self.k, tuple(x / other for x in self.coeffs))
        a, b = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        out = CycScalar.rational(1, self.k)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- comparison --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and self.is_rational()
        if not isinstance(other, CycScalar):
            return NotImplemented
        if self.k == other.k:
            return self.coeffs == other.coeffs
        if self.is_rational() and other.is_rational():
            return self.coeffs[0] == other.coeffs[0]
        return False

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash((self.k, self.coeffs))
        return self._hash

    def __repr__(self):
        return f"CycScalar({self.k}, {self.to_text()})"

    def to_text(self, name="zeta"):
        """Render as a parseable string, e.g. ``3/2`` or ``(1 - zeta)``."""
        if self.is_rational():
            return _frac_text(self.coeffs[0])
        parts = []
        for e, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if e == 0 else (name if e == 1 else f"{name}^{e}")
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{_frac_text(mag)} {mono}"
            else:
                body = _frac_text(mag)
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return "(" + " ".join(parts) + ")"

    __str__ = to_text


def _frac_text(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def as_scalar(value, k=1):
    """Coerce an int, Fraction or CycScalar into a CycScalar of index k."""
    if isinstance(value, CycScalar):
        return value.with_k(k) if value.k != k and value.is_rational() else value
    return CycScalar.rational(Fraction(value), k)


@lru_cache(maxsize=None)
def cyc_power_of_xi(k: int, e: int) -> CycScalar:
    """zeta_k ** (e mod k) as a reduced element."""
    e %= k
    poly = [Fraction(0)] * e + [Fraction(1)]
    return CycScalar(k, poly)


def cyc_arith(a: CycScalar, b: CycScalar, op: str) -> CycScalar:
    if a.k != b.k:
        raise IndexMismatch(f"cyclotomic index mismatch: {a.k} vs {b.k}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def zero(k=1):
    return CycScalar.rational(0, k)


def one(k=1):
    return CycScalar.rational(1, k)


class CycVector:
    """An element of the algebra Q(zeta_k)^k with componentwise product."""

    __slots__ = ("k", "entries")

    def __init__(self, k, entries):
        entries = tuple(as_scalar(e, k) for e in entries)
        if len(entries) != k:
            raise IndexMismatch(f"expected {k} entries, got {len(entries)}")
        self.k = k
        self.entries = entries

    @classmethod
    def constant(cls, k, value):
        return cls(k, [value] * k)

    def __add__(self, other):
        return CycVector(self.k, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return CycVector(self.k, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return CycVector(self.k, [-a for a in self.entries])

    def __mul__(self, other):
        if isinstance(other, CycVector):
            return CycVector(self.k, [a * b for a, b in zip(self.entries, other.entries)])
        return CycVector(self.k, [a * other for a in self.entries])

    __rmul__ = __mul__

    def shift(self, m):
        """The entry rotation v -> (v[(j + m) mod k])_j."""
        k = self.k
        return CycVector(k, [self.entries[(j + m) % k] for j in range(k)])

    def is_zero(self):
        return all(e.is_zero() for e in self.entries)

    def __getitem__(self, j):
        return self.entries[j % self.k]

    def __eq__(self, other):
        return isinstance(other, CycVector) and self.k == other.k and self.entries == other.entries

    def __hash__(self):
        return hash((self.k, self.entries))

    def __repr__(self):
        return "(" + ", ".join(e.to_text() for e in self.entries) + ")"


# ---------------------------------------------------------------------------
# exact linear algebra over a field of CycScalars

def solve_linear(rows, rhs, k=1):
    """Solve ``rows @ x = rhs`` exactly.

    Returns ``(particular, kernel)`` where ``particular`` is one solution with
    free variables set to zero and ``kernel`` is a basis of the null space.
    Raises ValueError if the system is inconsistent.
    """
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    m = [[as_scalar(v, k) for v in row] + [as_scalar(b, k)] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if not m[i][ncols].is_zero():
            raise ValueError("inconsistent linear system")
    x = [zero(k)] * ncols
    for i, c in enumerate(pivots):
        x[c] = m[i][ncols]
    kernel = []
    free = [c for c in range(ncols) if c not in pivots]
    for f in free:
        v = [zero(k)] * ncols
        v[f] = one(k)
        for i, c in enumerate(pivots):
            v[c] = -m[i][f]
        kernel.append(v)
    return x, kernel

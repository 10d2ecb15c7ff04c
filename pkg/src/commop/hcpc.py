"""Homogeneous canonical polynomials and the graded ring they span.

A homogeneous component of order r is stored in G-form::

    (sum f[i, l] * G_l A_i  +  sum g[j] * B_j) * D^r

with G_l = (x d)^l, A_i the shift operators for a fixed root index k,
B_j = x^(j-1) delta d^(j-1) / (j-1)! and D^r = d^r for r >= 0, int^(-r)
otherwise.  Products of such monomials are closed-form (see ``mono_mul``),
so every computation in this module is exact and finite.
"""
from __future__ import annotations

from functools import lru_cache
from math import comb

from .errors import ContainsB
from .scalar import CycScalar, as_scalar, cyc_power_of_xi, one, solve_linear, zero

NEG_INF = float("-inf")


@lru_cache(maxsize=None)
def stirling1(n, m):
    """Signed Stirling numbers of the first kind: x(x-1)...(x-n+1) = sum s(n,m) x^m."""
    if n == m:
        return 1
    if m == 0 or m > n:
        return 0
    return stirling1(n - 1, m - 1) - (n - 1) * stirling1(n - 1, m)


@lru_cache(maxsize=None)
def stirling2(n, m):
    """Stirling numbers of the second kind: x^n = sum S(n,m) x(x-1)...(x-m+1)."""
    if n == m:
        return 1
    if m == 0 or m > n:
        return 0
    return m * stirling2(n - 1, m) + stirling2(n - 1, m - 1)


def _xi(k, e):
    return cyc_power_of_xi(k, e)


class HcpForm:
    """One homogeneous canonical polynomial, in G-form.

    ``ga`` maps ``(i, l)`` to the coefficient of ``G_l A_i D^r`` and ``b``
    maps ``j`` to the coefficient of ``B_j D^r``.  Indices i are reduced mod
    k, zero coefficients are dropped and so are the terms ``B_j D^r`` with
    ``j <= -r`` (they are the zero operator).
    """

    __slots__ = ("k", "order", "ga", "b")

    def __init__(self, k, order, ga=None, b=None):
        self.k = k
        self.order = order
        clean = {}
        for (i, l), c in (ga or {}).items():
            if l < 0:
                raise ValueError("Gamma degree must be non-negative")
            c = as_scalar(c, k)
            key = (i % k, l)
            clean[key] = clean[key] + c if key in clean else c
        self.ga = {key: c for key, c in clean.items() if not c.is_zero()}
        lowest = max(1, 1 - order)
        bclean = {}
        for j, c in (b or {}).items():
            if j < lowest:
                continue
            c = as_scalar(c, k)
            bclean[j] = bclean[j] + c if j in bclean else c
        self.b = {j: c for j, c in bclean.items() if not c.is_zero()}

    @classmethod
    def _trusted(cls, k, order, ga, b):
        obj = cls.__new__(cls)
        obj.k = k
        obj.order = order
        obj.ga = ga
        obj.b = b
        return obj

    # -- constructors --------------------------------------------------------
    @classmethod
    def monomial(cls, k, order, coeff=1, i=0, l=0):
        return cls(k, order, {(i, l): coeff})

    @classmethod
    def b_monomial(cls, k, order, j, coeff=1):
        return cls(k, order, b={j: coeff})

    @classmethod
    def zero(cls, k, order):
        return cls._trusted(k, order, {}, {})

    def with_k(self, k):
        """Re-index to a multiple root index; only i = 0 data can be moved."""
        if k == self.k:
            return self
        if any(i != 0 for i, _ in self.ga):
            raise ValueError(f"cannot move an HCP with A-terms from k={self.k} to k={k}")
        return HcpForm(k, self.order, {key: c.with_k(k) for key, c in self.ga.items()},
                       {j: c.with_k(k) for j, c in self.b.items()})

    # -- basic algebra ---------------------------------------------------------
    def is_zero(self):
        return not self.ga and not self.b

    def __bool__(self):
        return not self.is_zero()

    def _check(self, other):
        if self.order != other.order:
            raise ValueError("HCP orders differ")
        if self.k != other.k:
            a, b = _unify(self, other)
            return a, b
        return self, other

    def __add__(self, other):
        a, b = self._check(other)
        ga = dict(a.ga)
        for key, c in b.ga.items():
            ga[key] = ga[key] + c if key in ga else c
        bb = dict(a.b)
        for j, c in b.b.items():
            bb[j] = bb[j] + c if j in bb else c
        return HcpForm._trusted(a.k, a.order, {x: c for x, c in ga.items() if not c.is_zero()},
                                {x: c for x, c in bb.items() if not c.is_zero()})

    def __neg__(self):
        return HcpForm._trusted(self.k, self.order, {x: -c for x, c in self.ga.items()},
                                {x: -c for x, c in self.b.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_scalar(c, self.k)
        if c.is_zero():
            return HcpForm.zero(self.k, self.order)
        k = self.k if c.is_rational() else c.k
        return HcpForm._trusted(k, self.order, {x: v * c for x, v in self.ga.items()},
                                {x: v * c for x, v in self.b.items()})

    def __eq__(self, other):
        if not isinstance(other, HcpForm):
            return NotImplemented
        return self.order == other.order and self.ga == other.ga and self.b == other.b

    def __hash__(self):
        return hash((self.order, frozenset(self.ga.items()), frozenset(self.b.items())))

    # -- inspection ------------------------------------------------------------
    def sdeg_a(self):
        return max((l for _, l in self.ga), default=NEG_INF)

    def sdeg_b(self):
        return max(self.b, default=NEG_INF)

    def gamma_poly(self, i):
        """Coefficients {l: c} of the Gamma polynomial multiplying A_i."""
        return {l: c for (ii, l), c in self.ga.items() if ii == i}

    def sorted_ga(self):
        return sorted(self.ga.items())

    def sorted_b(self):
        return sorted(self.b.items())

    def has_a(self):
        return any(i != 0 for i, _ in self.ga)

    def __repr__(self):
        return f"HcpForm(k={self.k}, order={self.order}: {self.to_text()})"

    def to_text(self):
        """G-form rendering accepted by the expression parser."""
        terms = []
        dpart = _dpower_text(self.order)
        for (i, l), c in self.sorted_ga():
            factors = []
            if l:
                factors.append(f"G_{l}")
            if i:
                factors.append(f"A_{i}")
            if dpart:
                factors.append(dpart)
            terms.append((c, " ".join(factors)))
        for j, c in self.sorted_b():
            factors = [f"B_{j}"] + ([dpart] if dpart else [])
            terms.append((c, " ".join(factors)))
        return join_terms(terms)


def _dpower_text(r):
    if r == 0:
        return ""
    if r == 1:
        return "d"
    if r > 1:
        return f"d^{r}"
    if r == -1:
        return "int"
    return f"int^{-r}"


def join_terms(terms):
    """Join (coefficient, monomial text) pairs into a signed sum."""
    if not terms:
        return "0"
    out = []
    for c, mono in terms:
        neg = c.is_rational() and c.coeffs[0] < 0
        mag = -c if neg else c
        if mono:
            body = mono if mag == 1 else f"{mag.to_text()} {mono}"
        else:
            body = mag.to_text()
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


def _unify(a, b):
    if a.k == b.k:
        return a, b
    if a.k % b.k == 0 or b.k == 1:
        return a, b.with_k(a.k)
    if b.k % a.k == 0 or a.k == 1:
        return a.with_k(b.k), b
    raise ValueError(f"incompatible root indices {a.k} and {b.k}")


# ---------------------------------------------------------------------------
# products

def _add_into(d, key, c):
    if key in d:
        d[key] = d[key] + c
    else:
        d[key] = c


def mul_forms(H: HcpForm, M: HcpForm) -> HcpForm:
    """Product of two HCPs, expanded monomial by monomial."""
    H, M = _unify(H, M)
    k = H.k
    u, v = H.order, M.order
    w = u + v
    ga = {}
    bb = {}
    correction = u < 0 < v
    s_range = range(max(1, -u - v + 1), -u + 1) if correction else range(0)
    for (i, m), a in H.ga.items():
        for (j, n), a2 in M.ga.items():
            c = a * a2
            if u * j % k:
                c = c * _xi(k, u * j)
            ij = (i + j) % k
            for l in range(n + 1):
                coef = comb(n, l) * u ** (n - l)
                if coef:
                    _add_into(ga, (ij, l + m), c * coef)
            for s in s_range:
                coef = (u + s - 1) ** n * (s - 1) ** m
                if coef:
                    _add_into(bb, s, -(c * _xi(k, ij * (s - 1))) * coef)
        for jb, b2 in M.b.items():
            # G_m A_i D^u . B_jb D^v = xi^{i(jb-u-1)} (jb-u-1)^m B_{jb-u} D^{u+v}
            t = jb - u
            if t < 1:
                continue
            coef = (t - 1) ** m
            if coef:
                _add_into(bb, t, a * b2 * _xi(k, i * (t - 1)) * coef)
    for ib, b1 in H.b.items():
        for (j, n), a2 in M.ga.items():
            # B_ib D^u . G_n A_j D^v = xi^{j(u+ib-1)} (ib-1+u)^n B_ib D^{u+v}
            coef = (ib - 1 + u) ** n
            if coef:
                _add_into(bb, ib, b1 * a2 * _xi(k, j * (u + ib - 1)) * coef)
        for jb, b2 in M.b.items():
            if jb - u == ib:
                _add_into(bb, ib, b1 * b2)
    lowest = max(1, 1 - w)
    return HcpForm._trusted(
        k, w,
        {key: c for key, c in ga.items() if not c.is_zero()},
        {j: c for j, c in bb.items() if j >= lowest and not c.is_zero()},
    )


class Hcpc:
    """A finite sum of HCPs of different orders (an element of Hcpc(k))."""

    __slots__ = ("k", "parts")

    def __init__(self, k, parts=None):
        self.k = k
        clean = {}
        for r, h in (parts or {}).items():
            if h.order != r:
                raise ValueError("part order does not match its key")
            if h.k != k:
                h = h.with_k(k) if k % h.k == 0 else h
            if not h.is_zero():
                clean[r] = h
        self.parts = clean

    @classmethod
    def from_forms(cls, k, forms):
        parts = {}
        for h in forms:
            if h.order in parts:
                parts[h.order] = parts[h.order] + h
            else:
                parts[h.order] = h
        return cls(k, parts)

    @classmethod
    def scalar(cls, k, c):
        return cls(k, {0: HcpForm.monomial(k, 0, c)})

    def is_zero(self):
        return not self.parts

    def top(self):
        return max(self.parts, default=NEG_INF)

    def bottom(self):
        return min(self.parts, default=float("inf"))

    def __getitem__(self, r):
        return self.parts.get(r) or HcpForm.zero(self.k, r)

    def __add__(self, other):
        parts = dict(self.parts)
        for r, h in other.parts.items():
            parts[r] = parts[r] + h if r in parts else h
        return Hcpc(max(self.k, other.k), parts)

    def __neg__(self):
        return Hcpc(self.k, {r: -h for r, h in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return Hcpc(self.k, {r: h.scale(c) for r, h in self.parts.items()})

    def __mul__(self, other):
        return hcpc_mul(self, other)

    def __eq__(self, other):
        return isinstance(other, Hcpc) and self.parts == other.parts

    def __repr__(self):
        return f"Hcpc(k={self.k}: {self.to_text()})"

    def to_text(self):
        if not self.parts:
            return "0"
        return " + ".join(f"[{self.parts[r].to_text()}]" for r in sorted(self.parts, reverse=True))


HcpcCombination = Hcpc


def hcpc_mul(H: Hcpc, M: Hcpc, floor=NEG_INF) -> Hcpc:
    """Bilinear extension of the monomial laws; orders below ``floor`` are skipped."""
    parts = {}
    for u, h in H.parts.items():
        for v, m in M.parts.items():
            if u + v < floor:
                continue
            p = mul_forms(h, m)
            if p.is_zero():
                continue
            parts[u + v] = parts[u + v] + p if u + v in parts else p
    return Hcpc(max(H.k, M.k), parts)


def mono_mul(m1: HcpForm, m2: HcpForm) -> Hcpc:
    """Product of two single-term HCPs (any HcpForm is accepted)."""
    p = mul_forms(m1, m2)
    return Hcpc(p.k, {p.order: p})


def sdeg(H, which="A"):
    """Sdeg_A / Sdeg_B of an HcpForm or Hcpc; -inf on empty support."""
    forms = H.parts.values() if isinstance(H, Hcpc) else [H]
    if which == "A":
        return max((h.sdeg_a() for h in forms), default=NEG_INF)
    if which == "B":
        return max((h.sdeg_b() for h in forms), default=NEG_INF)
    raise ValueError("which must be 'A' or 'B'")


# ---------------------------------------------------------------------------
# standard form <-> G-form

class StandardHcp:
    """Standard-form data: ``std[i, l]`` is the coefficient of x^l A_i d^l."""

    __slots__ = ("k", "order", "std", "b")

    def __init__(self, k, order, std, b=None):
        self.k = k
        self.order = order
        self.std = {key: as_scalar(c, k) for key, c in std.items() if not as_scalar(c, k).is_zero()}
        self.b = dict(b or {})

    def __eq__(self, other):
        return (isinstance(other, StandardHcp) and self.order == other.order
                and self.std == other.std and self.b == other.b)

    def __repr__(self):
        return f"StandardHcp(k={self.k}, order={self.order}, std={self.std}, b={self.b})"


def standard_to_gform(S: StandardHcp) -> HcpForm:
    # x^l A_i d^l = xi^{-il} A_i x^l d^l and x^l d^l = sum_s s(l, s) G_s
    k = S.k
    ga = {}
    for (i, l), c in S.std.items():
        c = c * _xi(k, -i * l)
        for s in range(l + 1):
            st = stirling1(l, s)
            if st:
                _add_into(ga, (i % k, s), c * st)
    return HcpForm(k, S.order, ga, S.b)


def gform_to_standard(H: HcpForm) -> StandardHcp:
    # G_l = sum_s S(l, s) x^s d^s and A_i x^s d^s = xi^{is} x^s A_i d^s
    k = H.k
    std = {}
    for (i, l), c in H.ga.items():
        for s in range(l + 1):
            st = stirling2(l, s)
            if st:
                _add_into(std, (i, s), c * st * _xi(k, i * s))
    return StandardHcp(k, H.order, std, H.b)


def standard_gform_convert(H, direction):
    if direction == "to_gform":
        return standard_to_gform(H)
    if direction == "to_standard":
        return gform_to_standard(H)
    raise ValueError("direction must be 'to_gform' or 'to_standard'")


# ---------------------------------------------------------------------------
# freeness of B_j

def is_totally_free_of_b(H: HcpForm):
    """Return ``(flag, witness)``.

    The witness is ``None`` when free, ``("B", j)`` for an explicit B_j term,
    or ``("system", j)`` for the first j whose Vandermonde-type equation
    sum_{i,m} xi^{i(j-1)} (j-1)^m a[m,i] = 0 fails.
    """
    if H.b:
        return False, ("B", min(H.b))
    if H.order >= 0:
        return True, None
    for j in range(1, -H.order + 1):
        if not _free_equation(H, j).is_zero():
            return False, ("system", j)
    return True, None


def _free_equation(H, j):
    k = H.k
    total = zero(k)
    for (i, m), a in H.ga.items():
        coef = (j - 1) ** m
        if coef:
            total = total + a * _xi(k, i * (j - 1)) * coef
    return total


# ---------------------------------------------------------------------------
# the equation [d^k, H] = M

def _step_poly(c, k):
    """Solve h(G + k) - h(G) = c(G) for h with zero constant term.

    ``c`` is ``{degree: coeff}``; the system is triangular with diagonal
    entries k, 2k, 3k, ...
    """
    if not c:
        return {}
    d = max(c)
    h = {}
    for a in range(d, -1, -1):
        rhs = c.get(a) or zero(k)
        for b in range(a + 2, d + 2):
            if b in h:
                rhs = rhs - h[b] * (comb(b, a) * k ** (b - a))
        h[a + 1] = rhs / ((a + 1) * k)
    return {l: v for l, v in h.items() if not as_scalar(v).is_zero()}


def kernel_basis(k, order):
    """Basis of the order-``order`` part of the centralizer of d^k."""
    if order >= 0:
        return [HcpForm.monomial(k, order, 1, i, 0) for i in range(k)]
    if order <= -k:
        return []
    rows = [[_xi(k, i * (s - 1)) for i in range(k)] for s in range(1, -order + 1)]
    _, ker = solve_linear(rows, [0] * len(rows), k)
    return [HcpForm(k, order, {(i, 0): c for i, c in enumerate(vec)}) for vec in ker]


def commutator_solve(M, k, orders=None):
    """Solve [d^k, H] = M for a B-free HCPC M.

    Returns ``(particular, kernel)`` where ``particular`` is an Hcpc and
    ``kernel`` is a list of HcpForms spanning the homogeneous solutions at
    the orders of the particular solution (or at ``orders`` if given; order
    0 when M is zero and no orders are given).
    """
    if isinstance(M, HcpForm):
        M = Hcpc(M.k, {M.order: M})
    parts = {}
    for m, comp in M.parts.items():
        if comp.b:
            raise ContainsB(f"right-hand side contains B_{min(comp.b)} at order {m}")
        parts[m - k] = _solve_one(comp.with_k(k) if comp.k != k else comp, k)
    particular = Hcpc(k, parts)
    if orders is None:
        orders = sorted((m - k for m in M.parts), reverse=True) if M.parts else [0]
    kernel = []
    for r in orders:
        kernel.extend(kernel_basis(k, r))
    return particular, kernel


def _solve_one(comp, k):
    m = comp.order
    r = m - k
    ga = {}
    for i in range(k):
        for l, c in _step_poly(comp.gamma_poly(i), k).items():
            ga[(i, l)] = c
    if r >= 0:
        return HcpForm(k, r, ga)
    # constants fixed by the vanishing of the B-terms B_s, s in [max(1, 1-m), k-m]
    svals = list(range(max(1, 1 - m), k - m + 1))
    rows, rhs = [], []
    for s in svals:
        rows.append([_xi(k, i * (s - 1)) for i in range(k)])
        acc = zero(k)
        for (i, l), c in ga.items():
            acc = acc + c * _xi(k, i * (s - 1)) * (s - 1) ** l
        rhs.append(-acc)
    if len(svals) < k:
        # underdetermined: pin the trailing constants to zero
        sub = [row[: len(svals)] for row in rows]
        x, _ = solve_linear(sub, rhs, k)
        x = x + [zero(k)] * (k - len(svals))
    else:
        x, _ = solve_linear(rows, rhs, k)
    for i, c in enumerate(x):
        if not c.is_zero():
            ga[(i, 0)] = c
    return HcpForm(k, r, ga)


def commutator_with_dk(H, k):
    """[d^k, H] computed with the product laws."""
    dk = Hcpc(k, {k: HcpForm.monomial(k, k)})
    if isinstance(H, HcpForm):
        H = Hcpc(k, {H.order: H})
    return hcpc_mul(dk, H) - hcpc_mul(H, dk)


__all__ = [
    "HcpForm", "Hcpc", "HcpcCombination", "StandardHcp", "mul_forms", "mono_mul", "hcpc_mul",
    "sdeg", "standard_gform_convert", "standard_to_gform", "gform_to_standard",
    "is_totally_free_of_b", "commutator_solve", "commutator_with_dk", "kernel_basis",
    "stirling1", "stirling2", "join_terms", "CycScalar", "one",
]

"""Truncated graded operators, generators and module actions.

An operator is a finite map from order m to its homogeneous component,
plus a floor below which nothing is known.  Components are either HCPs
(exact, preferred) or canonical components: finitely many terms
alpha * x^a d^(a+m), known up to some x-degree ``cap``.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

from .errors import InsufficientPrecision, InvalidIndex
from .hcpc import NEG_INF, HcpForm, Hcpc, hcpc_mul, join_terms, stirling1, stirling2
from .scalar import as_scalar, cyc_power_of_xi, zero

INF = float("inf")


def _falling(n, r):
    """n! / (n - r)! for any integer r, as a Fraction (0 when n < r)."""
    if r >= 0:
        if n < r:
            return Fraction(0)
        out = 1
        for t in range(n - r + 1, n + 1):
            out *= t
        return Fraction(out)
    out = 1
    for t in range(n + 1, n - r + 1):
        out *= t
    return Fraction(1, out)


# ---------------------------------------------------------------------------
# series and polynomials

class XSeries:
    """A truncated power series in x: degrees >= ``precision`` are unknown."""

    __slots__ = ("coeffs", "precision")

    def __init__(self, coeffs=None, precision=INF, k=1):
        coeffs = coeffs or {}
        if isinstance(coeffs, (list, tuple)):
            coeffs = dict(enumerate(coeffs))
        self.precision = precision
        self.coeffs = {}
        for d, c in coeffs.items():
            c = as_scalar(c, k)
            if d < precision and not c.is_zero():
                self.coeffs[d] = c

    def __getitem__(self, d):
        if d >= self.precision:
            raise InsufficientPrecision(f"degree {d} beyond precision {self.precision}")
        return self.coeffs.get(d, zero())

    def __add__(self, other):
        p = min(self.precision, other.precision)
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out[d] + c if d in out else c
        return XSeries(out, p)

    def __neg__(self):
        return XSeries({d: -c for d, c in self.coeffs.items()}, self.precision)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, XSeries):
            return XSeries({d: c * other for d, c in self.coeffs.items()}, self.precision)
        lo_a = min(self.coeffs, default=INF)
        lo_b = min(other.coeffs, default=INF)
        p = min(self.precision + (lo_b if lo_b != INF else 0),
                other.precision + (lo_a if lo_a != INF else 0))
        out = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                if d1 + d2 < p:
                    out[d1 + d2] = out[d1 + d2] + c1 * c2 if d1 + d2 in out else c1 * c2
        return XSeries(out, p)

    __rmul__ = __mul__

    def derivative(self):
        return XSeries({d - 1: c * d for d, c in self.coeffs.items() if d > 0}, self.precision - 1)

    def truncate(self, precision):
        return XSeries(self.coeffs, min(precision, self.precision))

    def __eq__(self, other):
        return (isinstance(other, XSeries) and self.precision == other.precision
                and self.coeffs == other.coeffs)

    def agrees_with(self, other):
        """Equality on the degrees known to both."""
        p = min(self.precision, other.precision)
        keys = {d for d in list(self.coeffs) + list(other.coeffs) if d < p}
        return all(self.coeffs.get(d, 0) == other.coeffs.get(d, 0) for d in keys)

    def __repr__(self):
        return f"XSeries({self.to_text()})"

    def to_text(self):
        terms = []
        for d in sorted(self.coeffs):
            mono = "" if d == 0 else ("x" if d == 1 else f"x^{d}")
            terms.append((self.coeffs[d], mono))
        body = join_terms(terms)
        if self.precision != INF:
            body += f" + O(x^{self.precision})"
        return body


class DPolynomial:
    """A polynomial in d with constant coefficients (an element of K[d])."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        coeffs = coeffs or {}
        if isinstance(coeffs, (list, tuple)):
            coeffs = dict(enumerate(coeffs))
        self.coeffs = {d: as_scalar(c) for d, c in coeffs.items() if not as_scalar(c).is_zero()}

    def __eq__(self, other):
        return isinstance(other, DPolynomial) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"DPolynomial({self.to_text()})"

    def to_text(self):
        terms = []
        for d in sorted(self.coeffs, reverse=True):
            mono = "" if d == 0 else ("d" if d == 1 else f"d^{d}")
            terms.append((self.coeffs[d], mono))
        return join_terms(terms)


# ---------------------------------------------------------------------------
# canonical components

class CanonicalComponent:
    """Homogeneous component sum alpha[a] x^a d^(a+order), known for a <= cap."""

    __slots__ = ("order", "terms", "cap")

    def __init__(self, order, terms=None, cap=None):
        self.order = order
        self.cap = cap
        self.terms = {}
        for a, c in (terms or {}).items():
            if a + order < 0 or a < 0:
                raise ValueError(f"term x^{a} d^{a + order} is not a canonical monomial")
            c = as_scalar(c)
            if (cap is None or a <= cap) and not c.is_zero():
                self.terms[a] = c

    @property
    def known_to(self):
        return INF if self.cap is None else self.cap

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if self.order != other.order:
            raise ValueError("orders differ")
        cap = _min_cap(self.cap, other.cap)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out[a] + c if a in out else c
        return CanonicalComponent(self.order, out, cap)

    def __neg__(self):
        return CanonicalComponent(self.order, {a: -c for a, c in self.terms.items()}, self.cap)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return CanonicalComponent(self.order, {a: v * c for a, v in self.terms.items()}, self.cap)

    def truncate(self, cap):
        return CanonicalComponent(self.order, self.terms, _min_cap(self.cap, cap))

    def agrees_with(self, other, cap=None):
        """Coefficient equality on x-degrees known to both (and <= cap)."""
        limit = min(self.known_to, other.known_to, INF if cap is None else cap)
        keys = {a for a in list(self.terms) + list(other.terms) if a <= limit}
        return self.order == other.order and all(
            self.terms.get(a, 0) == other.terms.get(a, 0) for a in keys)

    def __eq__(self, other):
        return (isinstance(other, CanonicalComponent) and self.order == other.order
                and self.cap == other.cap and self.terms == other.terms)

    def __repr__(self):
        return f"CanonicalComponent(order={self.order}: {self.to_text()})"

    def to_text(self):
        terms = []
        for a in sorted(self.terms):
            b = a + self.order
            parts = []
            if a:
                parts.append("x" if a == 1 else f"x^{a}")
            if b:
                parts.append("d" if b == 1 else f"d^{b}")
            terms.append((self.terms[a], " ".join(parts)))
        body = join_terms(terms)
        if self.cap is not None:
            body += f" + O(x^{self.cap + 1})"
        return body


def _min_cap(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def canon_mul(P: CanonicalComponent, Q: CanonicalComponent) -> CanonicalComponent:
    """Product of two canonical components via the Leibniz rule.

    x^a d^b . x^c d^e = sum_t C(b, t) c!/(c-t)! x^(a+c-t) d^(b-t+e)
    """
    m = P.order
    cap = _min_cap(P.cap, None if Q.cap is None else Q.cap - m)
    out = {}
    for a, ca in P.terms.items():
        b = a + m
        for c, cc in Q.terms.items():
            base = ca * cc
            for t in range(min(b, c) + 1):
                e = a + c - t
                if cap is not None and e > cap:
                    continue
                coef = comb(b, t) * _falling(c, t)
                out[e] = out[e] + base * coef if e in out else base * coef
    return CanonicalComponent(m + Q.order, out, cap)


def hcp_act(H: HcpForm, n: int):
    """Coefficient c with H o x^n = c x^(n - order)."""
    r = H.order
    if n - r < 0:
        return zero(H.k)
    f = _falling(n, r)
    if f == 0:
        return zero(H.k)
    total = zero(H.k)
    e = n - r
    for (i, l), c in H.ga.items():
        total = total + c * cyc_power_of_xi(H.k, i * e) * (e ** l)
    for j, c in H.b.items():
        if e == j - 1:
            total = total + c
    return total * f


def hcp_to_canonical(H: HcpForm, cap: int) -> CanonicalComponent:
    """Canonical coefficients of an HCP for x-degrees <= cap.

    Uses the action on monomials, which determines a homogeneous component
    through a triangular system.
    """
    r = H.order
    alpha = {}
    for a in range(max(0, -r), cap + 1):
        n = a + r
        val = hcp_act(H, n)
        for a2, c in alpha.items():
            val = val - c * _falling(n, a2 + r)
        alpha[a] = val / factorial(n)
    return CanonicalComponent(r, alpha, cap)


def canonical_to_hcp(C: CanonicalComponent, k=1) -> HcpForm:
    """Exact HCP of a finite canonical component: x^a d^b = x(x-1).. G-form times D^(b-a)."""
    if C.cap is not None:
        raise InsufficientPrecision("a truncated canonical series has no exact HCP")
    ga = {}
    for a, c in C.terms.items():
        for s in range(a + 1):
            st = stirling1(a, s)
            if st:
                key = (0, s)
                ga[key] = ga[key] + c * st if key in ga else c * st
    return HcpForm(k, C.order, ga)


# ---------------------------------------------------------------------------
# truncated operators

class TruncatedOp:
    """Graded operator with known components at orders >= floor."""

    __slots__ = ("k", "components", "floor")

    def __init__(self, k, components=None, floor=NEG_INF):
        self.k = k
        self.floor = floor
        self.components = {}
        for m, comp in (components or {}).items():
            if comp.order != m:
                raise ValueError("component order does not match its key")
            if m < floor:
                continue
            if isinstance(comp, HcpForm) and comp.k != k:
                comp = comp.with_k(k)
            if not comp.is_zero():
                self.components[m] = comp

    # -- construction ----------------------------------------------------------
    @classmethod
    def from_hcpc(cls, H: Hcpc, floor=NEG_INF, k=None):
        return cls(k or H.k, dict(H.parts), floor)

    @classmethod
    def from_forms(cls, k, forms, floor=NEG_INF):
        return cls.from_hcpc(Hcpc.from_forms(k, forms), floor, k)

    @classmethod
    def scalar(cls, k, c):
        return cls(k, {0: HcpForm.monomial(k, 0, c)})

    # -- inspection ------------------------------------------------------------
    @property
    def top(self):
        return max(self.components, default=NEG_INF)

    def is_exact(self):
        return self.floor == NEG_INF

    def is_zero(self):
        return not self.components

    def is_hcp(self):
        return all(isinstance(c, HcpForm) for c in self.components.values())

    def __getitem__(self, m):
        if m < self.floor:
            raise InsufficientPrecision(f"order {m} is below the floor {self.floor}")
        comp = self.components.get(m)
        if comp is None:
            return HcpForm.zero(self.k, m)
        return comp

    def orders(self):
        return sorted(self.components, reverse=True)

    def hcpc(self):
        if not self.is_hcp():
            raise TypeError("operator has canonical components")
        return Hcpc(self.k, dict(self.components))

    def symbol(self):
        """The top component."""
        return self.components[self.top] if self.components else None

    # -- arithmetic ------------------------------------------------------------
    def _binary(self, other, sign):
        if not isinstance(other, TruncatedOp):
            other = TruncatedOp.scalar(self.k, other)
        floor = max(self.floor, other.floor)
        k = max(self.k, other.k)
        comps = {m: c for m, c in self.components.items() if m >= floor}
        for m, c in other.components.items():
            if m < floor:
                continue
            c = c if sign > 0 else -c
            if m in comps:
                comps[m] = _add_components(comps[m], c)
            else:
                comps[m] = c
        return TruncatedOp(k, comps, floor)

    def __add__(self, other):
        return self._binary(other, 1)

    def __sub__(self, other):
        return self._binary(other, -1)

    __radd__ = __add__

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TruncatedOp(self.k, {m: -c for m, c in self.components.items()}, self.floor)

    def scale(self, c):
        return TruncatedOp(self.k, {m: comp.scale(c) for m, comp in self.components.items()},
                           self.floor)

    def __mul__(self, other):
        if isinstance(other, TruncatedOp):
            return op_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e):
        out = TruncatedOp.scalar(self.k, 1)
        for _ in range(e):
            out = op_mul(out, self)
        return out

    def truncate(self, floor):
        return TruncatedOp(self.k, self.components, max(self.floor, floor))

    def __eq__(self, other):
        return (isinstance(other, TruncatedOp) and self.floor == other.floor
                and self.components == other.components)

    def agrees_with(self, other):
        """Equality of all components at orders known to both operators."""
        floor = max(self.floor, other.floor)
        orders = {m for m in list(self.components) + list(other.components) if m >= floor}
        for m in orders:
            a, b = self[m], other[m]
            if isinstance(a, HcpForm) and isinstance(b, HcpForm):
                if (a - b).is_zero():
                    continue
                return False
            if not to_canonical(a, 12).agrees_with(to_canonical(b, 12)):
                return False
        return True

    def __repr__(self):
        return f"TruncatedOp(k={self.k}, floor={self.floor}: {self.to_text()})"

    def to_text(self):
        pieces = []
        for m in self.orders():
            pieces.append(self.components[m].to_text())
        body = " + ".join(pieces) if pieces else "0"
        body = body.replace("+ -", "- ")
        if self.floor != NEG_INF:
            body += f" + O(ord {self.floor - 1})"
        return body


def _add_components(a, b):
    if isinstance(a, HcpForm) and isinstance(b, HcpForm):
        return a + b
    cap = None
    for c in (a, b):
        if isinstance(c, CanonicalComponent) and c.cap is not None:
            cap = _min_cap(cap, c.cap)
    return to_canonical(a, cap) + to_canonical(b, cap)


def to_canonical(comp, cap):
    if isinstance(comp, CanonicalComponent):
        return comp if cap is None else comp.truncate(cap)
    if cap is None:
        raise InsufficientPrecision("an HCP needs an x-degree cap for its canonical series")
    return hcp_to_canonical(comp, cap)


def op_mul(P: TruncatedOp, Q: TruncatedOp, xcap=12) -> TruncatedOp:
    """Product with floor tracking: floor = max(P.floor + Q.top, Q.floor + P.top)."""
    if P.is_zero() or Q.is_zero():
        floor = max(P.floor + (Q.top if not Q.is_zero() else 0),
                    Q.floor + (P.top if not P.is_zero() else 0))
        if P.is_zero() and P.is_exact() or Q.is_zero() and Q.is_exact():
            floor = NEG_INF
        return TruncatedOp(max(P.k, Q.k), {}, floor)
    floor = max(P.floor + Q.top, Q.floor + P.top)
    k = max(P.k, Q.k)
    if P.is_hcp() and Q.is_hcp():
        prod = hcpc_mul(Hcpc(k, P.components), Hcpc(k, Q.components), floor)
        return TruncatedOp(k, prod.parts, floor)
    comps = {}
    for a, ca in P.components.items():
        for b, cb in Q.components.items():
            if a + b < floor:
                continue
            term = canon_mul(to_canonical(ca, xcap), to_canonical(cb, xcap + abs(a) + 2))
            comps[a + b] = comps[a + b] + term if a + b in comps else term
    return TruncatedOp(k, comps, floor)


def op_apply(P: TruncatedOp, f: XSeries) -> XSeries:
    """The left action on power series."""
    top = P.top if not P.is_zero() else 0
    prec = min(f.precision - top, 1 - P.floor)
    out = {}
    for m, comp in P.components.items():
        if isinstance(comp, CanonicalComponent):
            if comp.cap is not None:
                prec = min(prec, comp.cap + 1)
            for n, c in f.coeffs.items():
                e = n - m
                if e < 0 or e >= prec:
                    continue
                val = zero()
                for a, alpha in comp.terms.items():
                    if a + m <= n:
                        val = val + alpha * _falling(n, a + m)
                if not val.is_zero():
                    out[e] = out[e] + c * val if e in out else c * val
        else:
            for n, c in f.coeffs.items():
                e = n - m
                if e < 0 or e >= prec:
                    continue
                val = hcp_act(comp, n)
                if not val.is_zero():
                    out[e] = out[e] + c * val if e in out else c * val
    return XSeries(out, prec)


def f_action(f: DPolynomial, P: TruncatedOp) -> DPolynomial:
    """The right-module action on K[d]: f.P reduced modulo x."""
    if not f.coeffs:
        return DPolynomial()
    need = -max(f.coeffs)
    if P.floor > need:
        raise InsufficientPrecision(
            f"x-degree-0 terms of f.P need components down to order {need}, floor is {P.floor}")
    out = {}
    for n, c in f.coeffs.items():
        prod = op_mul(make_generator("d", k=P.k) ** n if n else TruncatedOp.scalar(P.k, 1), P)
        for r, comp in prod.components.items():
            if r < 0:
                continue
            if isinstance(comp, HcpForm):
                val = zero(P.k)
                for (i, l), v in comp.ga.items():
                    if l == 0:
                        val = val + v
                if 1 in comp.b:
                    val = val + comp.b[1]
            else:
                val = comp.terms.get(0, zero())
            if not val.is_zero():
                out[r] = out[r] + c * val if r in out else c * val
    return DPolynomial(out)


def slice_op(P: TruncatedOp, q: int) -> DPolynomial:
    """The x-degree-q slice: returns c with P_[q] = x^q * sum c[b] d^b."""
    if P.floor > -q:
        raise InsufficientPrecision(f"slice {q} needs components down to order {-q}")
    out = {}
    for m, comp in P.components.items():
        if m < -q:
            continue
        canon = to_canonical(comp, q)
        if canon.cap is not None and canon.cap < q:
            raise InsufficientPrecision(f"component {m} is only known to x-degree {canon.cap}")
        c = canon.terms.get(q)
        if c is not None:
            out[q + m] = c
    return DPolynomial(out)


slice = slice_op


# ---------------------------------------------------------------------------
# generators

def _canonical_generator(kind, k, index, cap):
    if kind == "x":
        return CanonicalComponent(-1, {1: 1})
    if kind == "d":
        return CanonicalComponent(1, {0: 1})
    if kind == "delta":
        return CanonicalComponent(0, {n: Fraction((-1) ** n, factorial(n)) for n in range(cap + 1)}, cap)
    if kind == "int":
        return CanonicalComponent(-1, {n + 1: Fraction((-1) ** n, factorial(n + 1)) for n in range(cap)}, cap)
    if kind == "gamma":
        return CanonicalComponent(0, {s: stirling2(index, s) for s in range(index + 1)})
    if kind == "a":
        w = cyc_power_of_xi(k, index) - 1
        return CanonicalComponent(0, {n: w ** n / factorial(n) for n in range(cap + 1)}, cap)
    if kind == "b":
        j = index
        return CanonicalComponent(
            0, {j - 1 + n: Fraction((-1) ** n, factorial(n) * factorial(j - 1))
                for n in range(max(cap - j + 2, 0))}, cap)
    raise InvalidIndex(f"unknown generator {kind!r}")


def make_generator(kind, depth=0, k=1, index=0, form="hcp"):
    """One of x, d, int, delta, gamma(index), a(k, index), b(index).

    ``form="canonical"`` returns the exponential-series expansion truncated
    at x-degree ``max(depth, 0)`` instead of the exact HCP.
    """
    if kind == "a" and k <= 0:
        raise InvalidIndex("A_{k;i} needs k >= 1")
    if kind == "b" and index <= 0:
        return TruncatedOp(k, {})
    if kind == "gamma" and index < 0:
        raise InvalidIndex("Gamma index must be non-negative")
    if form == "canonical":
        comp = _canonical_generator(kind, k, index, max(depth, 0))
        return TruncatedOp(k, {comp.order: comp})
    if kind == "x":
        h = HcpForm.monomial(k, -1, 1, 0, 1)
    elif kind == "d":
        h = HcpForm.monomial(k, 1)
    elif kind == "int":
        h = HcpForm.monomial(k, -1)
    elif kind == "delta":
        h = HcpForm.b_monomial(k, 0, 1)
    elif kind == "gamma":
        h = HcpForm.monomial(k, 0, 1, 0, index)
    elif kind == "a":
        h = HcpForm.monomial(k, 0, 1, index, 0)
    elif kind == "b":
        h = HcpForm.b_monomial(k, 0, index)
    else:
        raise InvalidIndex(f"unknown generator {kind!r}")
    return TruncatedOp(k, {h.order: h})


def dpow(k, r, coeff=1):
    """The operator coeff * D^r (d^r or int^-r)."""
    return TruncatedOp(k, {r: HcpForm.monomial(k, r, coeff)})


def differential_operator(coeffs, k=1):
    """Exact-as-far-as-known operator sum c_b(x) d^b from XSeries coefficients.

    x^a d^b is the HCP x(x-1)..(x-a+1)[G] D^(b-a); a coefficient known
    modulo x^N limits the floor to b - N + 1.
    """
    forms = []
    floor = NEG_INF
    for b, series in coeffs.items():
        if not isinstance(series, XSeries):
            series = XSeries({0: series})
        if series.precision != INF:
            floor = max(floor, b - series.precision + 1)
        for a, c in series.coeffs.items():
            ga = {(0, s): c * stirling1(a, s) for s in range(a + 1) if stirling1(a, s)}
            forms.append(HcpForm(k, b - a, ga))
    op = TruncatedOp.from_forms(k, forms, floor)
    return op


def to_differential(P: TruncatedOp):
    """Rewrite a differential operator given by HCP components as {b: XSeries}.

    Negative-order components whose G_0 part vanishes are peeled as
    x * (component of order one higher), following the x = G_1 int identity.
    Raises ValueError if the operator is not differential.
    """
    out = {}
    for m, comp in P.components.items():
        if not isinstance(comp, HcpForm):
            comp = canonical_to_hcp(comp, P.k)
        if comp.b or comp.has_a():
            raise ValueError(f"component {m} is not a differential-operator component")
        poly = {l: c for (_, l), c in comp.ga.items()}
        xpow = 0
        order = m
        while order < 0:
            if poly.get(0) and not poly[0].is_zero():
                raise ValueError(f"component {m} has a nonzero integral tail")
            # sum_m p_m G^m D^r = x * sum_n (sum_{m>=1} C(m-1, n) p_m) G^n D^(r+1)
            new = {}
            for mm, c in poly.items():
                for n in range(mm):
                    cf = comb(mm - 1, n)
                    if cf:
                        new[n] = new[n] + c * cf if n in new else c * cf
            poly = {n: c for n, c in new.items() if not c.is_zero()}
            xpow += 1
            order += 1
        # now poly(G) d^order with order >= 0; G^l = sum_s S(l,s) x^s d^s
        for l, c in poly.items():
            for s in range(l + 1):
                st = stirling2(l, s)
                if not st:
                    continue
                b = s + order
                a = s + xpow
                coeff = c * st
                series = out.setdefault(b, {})
                series[a] = series[a] + coeff if a in series else coeff
    return {b: XSeries(s) for b, s in out.items() if any(not v.is_zero() for v in s.values())}


# ---------------------------------------------------------------------------
# stationary KdV series

def extend_stationary_kdv(u0, u1, u2, n) -> XSeries:
    """u = sum u_k x^k / k! solving u''' = -6 u u' with given u_0, u_1, u_2.

    Comparing x^k / k! coefficients gives
    u_{k+3} = -6 sum_{i=0}^{k} C(k, i) u_i u_{k-i+1}.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    u = [Fraction(u0), Fraction(u1), Fraction(u2)]
    for k in range(0, n - 2):
        u.append(-6 * sum(comb(k, i) * u[i] * u[k - i + 1] for i in range(k + 1)))
    u = u[: n + 1]
    return XSeries({d: v / factorial(d) for d, v in enumerate(u)}, n + 1)


def taylor_values(f: XSeries):
    """The derivatives f^(d)(0) = d! * coeff, for the known degrees."""
    top = f.precision if f.precision != INF else (max(f.coeffs, default=-1) + 1)
    return [f.coeffs.get(d, zero()) * factorial(d) for d in range(int(top))]

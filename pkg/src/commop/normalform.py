"""Normal forms of commuting pairs, their vector and matrix pictures.

* ``normal_form``   P' = S^{-1} P S for the Schur operator S of Q.
* ``phi_hat``       B-free HCPCs -> skew Laurent polynomials in D~ whose
                    coefficients are polynomials in G over Q(zeta_k)^k.
* ``psi_matrix``    G-free vector forms -> k x k matrices over Q(zeta)[W, 1/W].
* ``char_poly``     det(M - lambda), the spectral curve.
* ``normalize_nf``  the canonical representative under centralizer conjugation.
* ``diagonalize_in_ek``  conjugate until coefficients commute with D~^gcd(p, k).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, gcd

from .errors import (GammaPresent, InsufficientPrecision, NonCommuting, NotCentral, NotCoprime,
                     NotMonic, NotTotallyFree)
from .hcpc import NEG_INF, HcpForm, is_totally_free_of_b, join_terms, mul_forms
from .opcore import TruncatedOp
from .schur import _as_normalized, schur_inverse, schur_operator
from .scalar import CycVector, as_scalar, cyc_power_of_xi, zero


# ---------------------------------------------------------------------------
# normal forms

def normal_form(P: TruncatedOp, Q, depth: int) -> TruncatedOp:
    """P' = S^{-1} P S, computed down to order ord(P) - depth.

    If every computed component below order -q+1 vanishes and
    depth >= p + q, the result is returned as exact (floor -inf).  A nonzero
    component below -q+1 raises NonCommuting carrying that order.
    """
    Q = _as_normalized(Q)
    q = Q.q
    k = q
    P = _promote(P, k)
    if P.is_zero():
        return P
    p = P.top
    lead = P.components[p]
    if not isinstance(lead, HcpForm) or set(lead.ga) != {(0, 0)} or lead.b:
        raise NotMonic("P must have a constant highest coefficient")
    if P.floor > p - depth:
        raise InsufficientPrecision(
            f"depth {depth} needs P down to order {p - depth}; it is known down to {P.floor}")
    S = schur_operator(Q, depth)
    Sinv = schur_inverse(S)
    Pp = (Sinv * (P * S.base)).truncate(p - depth)
    for m in sorted(Pp.components):
        if m < -q + 1:
            raise NonCommuting(
                f"normal form has a nonzero component at order {m} < {-q + 1}: "
                f"{Pp.components[m].to_text()}", order=m, reason="noncommuting")
    if depth >= p + q:
        exact = TruncatedOp(k, {m: c for m, c in Pp.components.items() if m >= -q + 1})
        dq = HcpForm.monomial(k, q)
        for m in sorted(exact.components, reverse=True):
            comp = exact.components[m]
            if not (mul_forms(comp, dq) - mul_forms(dq, comp)).is_zero():
                raise NonCommuting(
                    f"normal form component at order {m} does not commute with d^{q}: "
                    f"{comp.to_text()}", order=m, reason="not-central")
        return exact
    return Pp


def _promote(P, k):
    if P.k == k:
        return P
    return TruncatedOp(k, {m: (c.with_k(k) if isinstance(c, HcpForm) else c)
                           for m, c in P.components.items()}, P.floor)


def commutes(P: TruncatedOp, Q: TruncatedOp):
    """(flag, witness order) for the exact or known part of [P, Q]."""
    R = P * Q - Q * P
    if R.is_zero():
        return True, None
    return False, R.top


# ---------------------------------------------------------------------------
# vector forms

@lru_cache(maxsize=None)
def phi_of_a(k, i):
    """Phi(A_i) = (xi^{i*0}, xi^{i*1}, ..., xi^{i(k-1)})."""
    return CycVector(k, [cyc_power_of_xi(k, i * l) for l in range(k)])


def _gshift(poly, m):
    """b(G) -> b(G + m) for {deg: CycVector}."""
    if m == 0:
        return poly
    out = {}
    for g, v in poly.items():
        for t in range(g + 1):
            c = comb(g, t) * m ** (g - t)
            if c:
                out[t] = out[t] + v * c if t in out else v * c
    return out


def _pmul(a, b, k):
    out = {}
    for g1, v1 in a.items():
        for g2, v2 in b.items():
            v = v1 * v2
            out[g1 + g2] = out[g1 + g2] + v if g1 + g2 in out else v
    return {g: v for g, v in out.items() if not v.is_zero()}


def _padd(a, b):
    out = dict(a)
    for g, v in b.items():
        out[g] = out[g] + v if g in out else v
    return {g: v for g, v in out.items() if not v.is_zero()}


class VectorFormOp:
    """Laurent polynomial sum_l c_l(G) D~^l with c_l in Q(zeta_k)^k[G].

    Multiplication uses D~^m b(G) = shift_m(b)(G + m) D~^m with
    shift_m(b)_j = b_{j+m}, the image of d^m A_i = xi^{im} A_i d^m and
    D^m G = (G + m) D^m.
    """

    def __init__(self, k, coeffs=None, floor=NEG_INF):
        self.k = k
        self.floor = floor
        self.coeffs = {}
        for l, poly in (coeffs or {}).items():
            if l < floor:
                continue
            if isinstance(poly, CycVector):
                poly = {0: poly}
            poly = {g: v for g, v in poly.items() if not v.is_zero()}
            if poly:
                self.coeffs[l] = poly

    @classmethod
    def constant(cls, k, l, vec):
        return cls(k, {l: {0: vec}})

    @classmethod
    def one(cls, k):
        return cls(k, {0: {0: CycVector.constant(k, 1)}})

    @property
    def top(self):
        return max(self.coeffs, default=NEG_INF)

    def gamma_degree(self):
        return max((max(p) for p in self.coeffs.values()), default=NEG_INF)

    def coefficient(self, l):
        """The G-degree-0 coefficient vector at D~^l."""
        return self.coeffs.get(l, {}).get(0, CycVector.constant(self.k, 0))

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        floor = max(self.floor, other.floor)
        out = {l: dict(p) for l, p in self.coeffs.items() if l >= floor}
        for l, p in other.coeffs.items():
            if l >= floor:
                out[l] = _padd(out.get(l, {}), p)
        return VectorFormOp(self.k, out, floor)

    def __neg__(self):
        return VectorFormOp(self.k, {l: {g: -v for g, v in p.items()} for l, p in self.coeffs.items()},
                            self.floor)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return VectorFormOp(self.k, {l: {g: v * c for g, v in p.items()} for l, p in self.coeffs.items()},
                            self.floor)

    def __mul__(self, other):
        if not isinstance(other, VectorFormOp):
            return self.scale(other)
        return self.mul(other)

    def mul(self, other, floor=NEG_INF):
        tops = (self.top if self.coeffs else 0, other.top if other.coeffs else 0)
        floor = max(floor, self.floor + tops[1], other.floor + tops[0])
        out = {}
        for m, a in self.coeffs.items():
            for n, b in other.coeffs.items():
                if m + n < floor:
                    continue
                shifted = _gshift({g: v.shift(m) for g, v in b.items()}, m)
                out[m + n] = _padd(out.get(m + n, {}), _pmul(a, shifted, self.k))
        return VectorFormOp(self.k, out, floor)

    def truncate(self, floor):
        return VectorFormOp(self.k, self.coeffs, max(self.floor, floor))

    def __eq__(self, other):
        return (isinstance(other, VectorFormOp) and self.k == other.k
                and self.floor == other.floor and self.coeffs == other.coeffs)

    def agrees_with(self, other):
        floor = max(self.floor, other.floor)
        keys = {l for l in list(self.coeffs) + list(other.coeffs) if l >= floor}
        return all(self.coeffs.get(l, {}) == other.coeffs.get(l, {}) for l in keys)

    def __repr__(self):
        return f"VectorFormOp(k={self.k}: {self.to_text()})"

    def to_text(self):
        terms = []
        for l in sorted(self.coeffs, reverse=True):
            for g in sorted(self.coeffs[l]):
                v = self.coeffs[l][g]
                parts = ["(" + ", ".join(e.to_text() for e in v.entries) + ")"]
                if g:
                    parts.append(f"G^{g}" if g > 1 else "G")
                if l:
                    parts.append(f"D~^{l}" if l != 1 else "D~")
                terms.append(" ".join(parts))
        body = " + ".join(terms) if terms else "0"
        if self.floor != NEG_INF:
            body += f" + O(D~^{self.floor - 1})"
        return body


def phi(k, coeffs):
    """Phi of sum_i p_i A_i given as {i: p_i}."""
    out = CycVector.constant(k, 0)
    for i, c in coeffs.items():
        out = out + phi_of_a(k, i) * as_scalar(c, k)
    return out


def phi_inverse(vec: CycVector):
    """{i: p_i} with Phi(sum p_i A_i) = vec, p_i = (1/k) sum_l vec_l xi^{-il}."""
    k = vec.k
    out = {}
    for i in range(k):
        acc = zero(k)
        for l in range(k):
            acc = acc + vec.entries[l] * cyc_power_of_xi(k, -i * l)
        acc = acc / k
        if not acc.is_zero():
            out[i] = acc
    return out


def phi_hat(H) -> VectorFormOp:
    """Embed a B-free HCPC (Hcpc or HCP TruncatedOp) into the vector picture."""
    if isinstance(H, TruncatedOp):
        parts, floor, k = H.components, H.floor, H.k
    elif isinstance(H, HcpForm):
        parts, floor, k = {H.order: H}, NEG_INF, H.k
    else:
        parts, floor, k = H.parts, NEG_INF, H.k
    coeffs = {}
    for r, comp in parts.items():
        if not isinstance(comp, HcpForm):
            raise NotTotallyFree(f"component {r} is not an HCP")
        ok, witness = is_totally_free_of_b(comp)
        if not ok:
            raise NotTotallyFree(f"component {r} is not totally free of B_j: {witness}")
        poly = {}
        for (i, l), c in comp.ga.items():
            v = phi_of_a(k, i) * c
            poly[l] = poly[l] + v if l in poly else v
        coeffs[r] = poly
    return VectorFormOp(k, coeffs, floor)


def phi_hat_inverse(V: VectorFormOp) -> TruncatedOp:
    k = V.k
    comps = {}
    for l, poly in V.coeffs.items():
        ga = {}
        for g, vec in poly.items():
            for i, c in phi_inverse(vec).items():
                ga[(i, g)] = c
        comps[l] = HcpForm(k, l, ga)
    return TruncatedOp(k, comps, V.floor)


# ---------------------------------------------------------------------------
# matrices over Q(zeta)[W, 1/W]

def _lp_add(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out[e] + c if e in out else c
    return {e: c for e, c in out.items() if not c.is_zero()}


def _lp_mul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out[e1 + e2] + c1 * c2 if e1 + e2 in out else c1 * c2
    return {e: c for e, c in out.items() if not c.is_zero()}


def _wpoly_text(p, var="W"):
    terms = []
    for e in sorted(p, reverse=True):
        mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
        terms.append((p[e], mono))
    return join_terms(terms)


class MatrixFormOp:
    """k x k matrix whose entries are Laurent polynomials {W-exponent: scalar}."""

    def __init__(self, k, entries):
        self.k = k
        self.entries = [[{e: as_scalar(c, k) for e, c in entries[i][j].items()
                          if not as_scalar(c, k).is_zero()} for j in range(k)] for i in range(k)]

    @classmethod
    def identity(cls, k, wpow=0):
        return cls(k, [[{wpow: 1} if i == j else {} for j in range(k)] for i in range(k)])

    def __add__(self, other):
        k = self.k
        return MatrixFormOp(k, [[_lp_add(self.entries[i][j], other.entries[i][j]) for j in range(k)]
                                for i in range(k)])

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        k = self.k
        return MatrixFormOp(k, [[{e: v * c for e, v in self.entries[i][j].items()} for j in range(k)]
                                for i in range(k)])

    def __mul__(self, other):
        if not isinstance(other, MatrixFormOp):
            return self.scale(other)
        k = self.k
        out = [[{} for _ in range(k)] for _ in range(k)]
        for i in range(k):
            for t in range(k):
                a = self.entries[i][t]
                if not a:
                    continue
                for j in range(k):
                    b = other.entries[t][j]
                    if b:
                        out[i][j] = _lp_add(out[i][j], _lp_mul(a, b))
        return MatrixFormOp(k, out)

    def __pow__(self, e):
        out = MatrixFormOp.identity(self.k)
        for _ in range(e):
            out = out * self
        return out

    def is_polynomial(self):
        return all(e >= 0 for row in self.entries for p in row for e in p)

    def is_zero(self):
        return all(not p for row in self.entries for p in row)

    def __eq__(self, other):
        return isinstance(other, MatrixFormOp) and self.entries == other.entries

    def __repr__(self):
        return f"MatrixFormOp({self.to_text()})"

    def to_text(self):
        return "[" + ", ".join("[" + ", ".join(_wpoly_text(p) for p in row) + "]"
                               for row in self.entries) + "]"


def companion(k):
    """psi(D~): ones on the superdiagonal and W in the bottom-left corner."""
    return psi_matrix(VectorFormOp.constant(k, 1, CycVector.constant(k, 1)))


def psi_matrix(V: VectorFormOp) -> MatrixFormOp:
    """sum_l diag(v_l) T^l, where (T^l)[i, (i+l) mod k] = W^floor((i+l)/k)."""
    if V.gamma_degree() > 0:
        raise GammaPresent("psi is only defined on G-free vector forms")
    if V.floor != NEG_INF:
        raise InsufficientPrecision("psi needs an exact (finite) vector form")
    k = V.k
    entries = [[{} for _ in range(k)] for _ in range(k)]
    for l, poly in V.coeffs.items():
        vec = poly[0]
        for i in range(k):
            c = vec.entries[i]
            if c.is_zero():
                continue
            j = (i + l) % k
            e = (i + l) // k
            entries[i][j] = _lp_add(entries[i][j], {e: c})
    return MatrixFormOp(k, entries)


# ---------------------------------------------------------------------------
# characteristic polynomial

class BiPoly:
    """Polynomial in (lambda, W): {(lambda degree, W degree): scalar}."""

    def __init__(self, terms=None):
        self.terms = {key: as_scalar(c) for key, c in (terms or {}).items()
                      if not as_scalar(c).is_zero()}

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out[key] + c if key in out else c
        return BiPoly(out)

    def __neg__(self):
        return BiPoly({key: -c for key, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, BiPoly):
            return BiPoly({key: c * other for key, c in self.terms.items()})
        out = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                out[key] = out[key] + c1 * c2 if key in out else c1 * c2
        return BiPoly(out)

    def __eq__(self, other):
        return isinstance(other, BiPoly) and self.terms == other.terms

    def __repr__(self):
        return f"BiPoly({self.to_text()})"

    def to_text(self):
        terms = []
        for (a, b) in sorted(self.terms, key=lambda t: (-t[0], -t[1])):
            parts = []
            if a:
                parts.append("lambda" if a == 1 else f"lambda^{a}")
            if b:
                parts.append("W" if b == 1 else f"W^{b}")
            terms.append((self.terms[(a, b)], " ".join(parts)))
        return join_terms(terms)


def char_poly(M: MatrixFormOp) -> BiPoly:
    """det(M - lambda Id) by cofactor expansion along rows, memoized on column sets."""
    if not M.is_polynomial():
        raise ValueError("char_poly needs entries in Q(zeta)[W]")
    k = M.k
    ent = [[BiPoly({(0, e): c for e, c in M.entries[i][j].items()}) for j in range(k)]
           for i in range(k)]
    for i in range(k):
        ent[i][i] = ent[i][i] - BiPoly({(1, 0): 1})
    memo = {}

    def minor(row, cols):
        if row == k:
            return BiPoly({(0, 0): 1})
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = BiPoly()
        sign = 1
        for j in range(k):
            if cols & (1 << j):
                continue
            if ent[row][j].terms:
                term = ent[row][j] * minor(row + 1, cols | (1 << j))
                total = total + (term if sign > 0 else -term)
            sign = -sign
        memo[key] = total
        return total

    return minor(0, 0)


def evaluate_at_matrix(f: BiPoly, M: MatrixFormOp) -> MatrixFormOp:
    """sum c[a, b] W^b M^a, for the Cayley-Hamilton check."""
    k = M.k
    out = MatrixFormOp(k, [[{} for _ in range(k)] for _ in range(k)])
    powers = {}
    for (a, b), c in f.terms.items():
        if a not in powers:
            powers[a] = M ** a
        out = out + powers[a] * MatrixFormOp.identity(k, b) * c
    return out


def evaluate_in_ring(f: BiPoly, P: TruncatedOp, q: int) -> TruncatedOp:
    """f(P, d^q) computed with exact HCP products."""
    k = P.k
    out = TruncatedOp(k, {})
    ppow = {0: TruncatedOp.scalar(k, 1)}
    for (a, b), c in sorted(f.terms.items()):
        for e in range(1, a + 1):
            if e not in ppow:
                ppow[e] = ppow[e - 1] * P
        term = ppow[a] * TruncatedOp(k, {q * b: HcpForm.monomial(k, q * b)})
        out = out + term.scale(c)
    return out


# ---------------------------------------------------------------------------
# normalization under the centralizer

def n_set(i, p, q):
    """Residues n mod q with (n p mod q) >= i."""
    return [n for n in range(q) if (n * p) % q >= i]


def forced_zeros(p, q):
    """{l: set of j} of coefficients forced to vanish in a normalized form."""
    out = {}
    for l in range(p - 1, -q, -1):
        zs = set()
        if p - q < l < p:
            zs.update(((n - 1) * p) % q for n in n_set(p - l, p, q))
        if l < 0:
            zs.update(range(-l))
        if zs:
            out[l] = zs
    return out


def _geometric_inverse(X: VectorFormOp, floor, k):
    """(1 + X)^{-1} for X of negative top order, truncated at floor."""
    out = VectorFormOp.one(k).truncate(floor)
    power = VectorFormOp.one(k).truncate(floor)
    minus = -X
    while True:
        power = power.mul(minus, floor).truncate(floor)
        if power.is_zero():
            return out
        out = out + power


def conjugate(V: VectorFormOp, S: VectorFormOp, floor) -> VectorFormOp:
    """S^{-1} V S truncated at floor, for S = 1 + (negative orders)."""
    k = V.k
    rest = S - VectorFormOp.one(k)
    span = (V.top if V.coeffs else 0) - floor
    Sinv = _geometric_inverse(rest, -span, k)
    return Sinv.mul(V.mul(S, floor), floor).truncate(floor)


def conjugate_in_centralizer(P: TruncatedOp, C: TruncatedOp, q: int) -> TruncatedOp:
    """C^{-1} P C for exact elements of C(d^q), C = 1 + (negative orders).

    Centralizer elements have no components below -q+1, so the truncated
    product is the exact answer.
    """
    P, C = _promote(P, q), _promote(C, q)
    if not (_is_central(P, q) and _is_central(C, q)):
        raise NotCentral("both operators must commute with d^q")
    out = conjugate(phi_hat(P), phi_hat(C), -q + 1)
    return TruncatedOp(q, phi_hat_inverse(out).components)


@dataclass
class NormalizedNF:
    k: int
    p: int
    op: TruncatedOp
    vector: VectorFormOp
    coordinates: list = field(default_factory=list)
    conjugator: VectorFormOp = None

    def coordinates_text(self):
        return "\n".join(f"p[{l},{j}] = {c.to_text()}" for l, j, c in self.coordinates)


def _leading_constant(V: VectorFormOp):
    p = V.top
    poly = V.coeffs[p]
    if set(poly) != {0}:
        raise NotMonic("leading coefficient contains G")
    vec = poly[0]
    c = vec.entries[0]
    if any(e != c for e in vec.entries):
        raise NotMonic("leading coefficient is not a constant")
    return p, c


def _is_central(Pp: TruncatedOp, q):
    k = Pp.k
    dq = TruncatedOp(k, {q: HcpForm.monomial(k, q)})
    return (Pp * dq - dq * Pp).is_zero()


def normalize_nf(Pp: TruncatedOp, q: int) -> NormalizedNF:
    """Normalized representative of an exact centralizer element of d^q."""
    if not Pp.is_exact():
        raise InsufficientPrecision("normalize_nf needs an exact operator")
    Pp = _promote(Pp, q)
    p = Pp.top
    if gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) != 1")
    if min(Pp.components, default=0) < -q + 1 or not _is_central(Pp, q):
        raise NotCentral("operator does not commute with d^q")
    V = phi_hat(Pp)
    if V.gamma_degree() > 0:
        raise NotCentral("centralizer elements have no G terms")
    p, c = _leading_constant(V)
    k = q
    floor = -q + 1
    total = VectorFormOp.one(k)
    for l in range(1, q):
        coeff = V.coefficient(p - l)
        s = [zero(k)] * q
        members = set(n_set(l, p, q))
        for n in range(1, q):
            idx, prev = (n * p) % q, ((n - 1) * p) % q
            if n in members:
                s[idx] = s[prev] - coeff.entries[prev] / c
        if all(x.is_zero() for x in s):
            continue
        Sl = VectorFormOp.one(k) + VectorFormOp.constant(k, -l, CycVector(k, s))
        V = conjugate(V, Sl, floor)
        total = total.mul(Sl)
    # conjugation stays in the centralizer, which has nothing below -q+1
    V = VectorFormOp(k, V.coeffs)
    op = TruncatedOp(k, dict(phi_hat_inverse(V).components))
    zeros = forced_zeros(p, q)
    coords = []
    for l in range(p - 1, -q, -1):
        vec = V.coefficient(l)
        for j in range(q):
            if j in zeros.get(l, ()):
                if not vec.entries[j].is_zero():
                    raise AssertionError(f"forced zero p[{l},{j}] is {vec.entries[j]}")
                continue
            coords.append((l, j, vec.entries[j]))
    return NormalizedNF(k, p, op, V, coords, total)


# ---------------------------------------------------------------------------
# diagonalization in the vector picture

def diagonalize_in_ek(V: VectorFormOp, depth: int):
    """Conjugate V = c D~^p + ... until coefficients are gcd(p, k)-periodic.

    Returns (S, result) truncated ``depth`` orders below the top.  The free
    parameter of each cyclic system is set to zero.
    """
    if V.gamma_degree() > 0:
        raise GammaPresent("diagonalization works on G-free vector forms")
    p, c = _leading_constant(V)
    k = V.k
    d = gcd(p, k)
    m = k // d
    floor = p - depth
    cur = V.truncate(floor)
    S_total = VectorFormOp.one(k).truncate(-depth)
    for l in range(1, depth + 1):
        coeff = cur.coefficient(p - l)
        s = [zero(k)] * k
        for i in range(d):
            orbit = [(i + r * p) % k for r in range(m)]
            b = zero(k)
            for j in orbit:
                b = b + coeff.entries[j]
            acc = zero(k)
            for r, j in enumerate(orbit):
                s[j] = acc / c
                acc = acc + b / m - coeff.entries[j]
        if all(x.is_zero() for x in s):
            continue
        Sl = VectorFormOp.one(k) + VectorFormOp.constant(k, -l, CycVector(k, s))
        cur = conjugate(cur, Sl, floor)
        S_total = S_total.mul(Sl.truncate(-depth), -depth)
    return S_total, cur


def is_periodic(vec: CycVector, d):
    return all(vec.entries[j] == vec.entries[(j + d) % vec.k] for j in range(vec.k))

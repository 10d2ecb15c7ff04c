"""Schur conjugating operators and the shape criteria for conjugates.

For a normalized differential operator Q = d^q + c_{q-2} d^{q-2} + ... the
Schur operator S = 1 + S_{-2} + S_{-3} + ... satisfies Q S = S d^q.  Order
by order this is the commutator equation

    [d^q, S_{-t}] = -(Q_{q-2} S_{-t+2} + ... + Q_{q-t}),

solved exactly in HCP form.  For t < q the solution is only fixed up to
homogeneous centralizer elements; those are pinned by asking S to have no
x^i terms for 0 < i < q, which makes S unique.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InsufficientPrecision, NotNormalized
from .hcpc import NEG_INF, HcpForm, Hcpc, commutator_solve, is_totally_free_of_b, mul_forms
from .opcore import (CanonicalComponent, TruncatedOp, XSeries, canonical_to_hcp,
                     differential_operator, hcp_to_canonical, to_differential)
from .scalar import solve_linear, zero


class NormalizedDiffOp:
    """Q = d^q + sum_{b <= q-2} c_b(x) d^b with coefficients known mod x^N."""

    def __init__(self, q, coeffs, x_precision=None):
        if q < 1:
            raise NotNormalized("order must be positive")
        self.q = q
        self.coeffs = {}
        for b, series in coeffs.items():
            if not isinstance(series, XSeries):
                series = XSeries(series)
            if x_precision is not None:
                series = series.truncate(x_precision)
            if b >= q - 1 and series.coeffs:
                raise NotNormalized(f"unexpected d^{b} coefficient")
            if series.coeffs or series.precision != float("inf"):
                self.coeffs[b] = series
        self.x_precision = x_precision

    @classmethod
    def from_operator(cls, op: TruncatedOp):
        """Validate a TruncatedOp as a normalized differential operator."""
        try:
            coeffs = to_differential(op)
        except ValueError as exc:
            raise NotNormalized(str(exc)) from None
        if not coeffs:
            raise NotNormalized("zero operator")
        q = max(coeffs)
        lead = coeffs.pop(q)
        if lead.coeffs != {0: lead.coeffs.get(0)} or lead.coeffs.get(0) != 1:
            raise NotNormalized("leading coefficient must be 1")
        if q - 1 in coeffs:
            raise NotNormalized(f"a normalized operator has no d^{q - 1} term")
        Q = cls(q, coeffs)
        Q._floor = op.floor
        return Q

    def operator(self, k=None) -> TruncatedOp:
        k = k or self.q
        coeffs = dict(self.coeffs)
        coeffs[self.q] = XSeries({0: 1})
        op = differential_operator(coeffs, k)
        floor = getattr(self, "_floor", NEG_INF)
        return op.truncate(floor) if floor != NEG_INF else op

    def __repr__(self):
        return f"NormalizedDiffOp(q={self.q}, {self.operator(1).to_text()})"


@dataclass
class SchurOp:
    """S = 1 + S_{-2} + ... + S_{-depth}, with every component an HCP."""

    q: int
    depth: int
    base: TruncatedOp

    def component(self, t):
        """S_{-t}."""
        return self.base[-t]

    @property
    def k(self):
        return self.base.k


def _as_normalized(Q):
    if isinstance(Q, NormalizedDiffOp):
        return Q
    return NormalizedDiffOp.from_operator(Q)


def _slice_coefficients(H: HcpForm, q):
    # canonical coefficients of H at x-degrees t..q-1 (t = -order)
    t = -H.order
    canon = hcp_to_canonical(H, q - 1)
    return [canon.terms.get(a, zero(H.k)) for a in range(t, q)]


def schur_operator(Q, depth: int, check=True) -> SchurOp:
    """The normalized Schur operator of Q computed down to order -depth."""
    Q = _as_normalized(Q)
    q = Q.q
    k = q
    Qop = Q.operator(k)
    if Qop.floor > q - depth:
        raise InsufficientPrecision(
            f"depth {depth} needs the components of Q down to order {q - depth}; "
            f"they are known only down to {Qop.floor}")
    comps = {0: HcpForm.monomial(k, 0)}
    for t in range(2, depth + 1):
        rhs = HcpForm.zero(k, q - t)
        for a in range(2, t + 1):
            qa = Qop[q - a]
            sa = comps.get(-t + a)
            if sa is None or qa.is_zero():
                continue
            rhs = rhs - mul_forms(qa, sa)
        part, kernel = commutator_solve(Hcpc(k, {q - t: rhs}), q, orders=[-t])
        sol = part[-t]
        if kernel:
            base = _slice_coefficients(sol, q)
            cols = [_slice_coefficients(h, q) for h in kernel]
            rows = [[col[e] for col in cols] for e in range(len(base))]
            coeffs, _ = solve_linear(rows, [-b for b in base], k)
            for c, h in zip(coeffs, kernel):
                sol = sol + h.scale(c)
        if not sol.is_zero():
            comps[-t] = sol
    S = SchurOp(q, depth, TruncatedOp(k, comps, -depth))
    if check:
        check_schur_bounds(S)
    return S


def check_schur_bounds(S: SchurOp):
    """Assert t/q - 1 < Sdeg_A(S_{-t}) < t and B-freeness for every component."""
    for m, comp in S.base.components.items():
        if m == 0:
            continue
        t = -m
        deg = comp.sdeg_a()
        if not (t / S.q - 1 < deg < t):
            raise AssertionError(f"degree bound violated at order {m}: Sdeg_A = {deg}")
        ok, witness = is_totally_free_of_b(comp)
        if not ok:
            raise AssertionError(f"component {m} is not totally free of B: {witness}")


def schur_inverse(S: SchurOp) -> TruncatedOp:
    """S^{-1} = 1 + S_- + S_-^2 + ... with S = 1 - S_-, truncated at the same floor."""
    base = S.base
    k = base.k
    one = TruncatedOp.scalar(k, 1)
    minus = TruncatedOp(k, {m: -c for m, c in base.components.items() if m != 0}, base.floor)
    out = one.truncate(base.floor)
    power = one.truncate(base.floor)
    for _ in range(S.depth // 2):
        power = (power * minus).truncate(base.floor)
        if power.is_zero():
            break
        out = out + power
    return out


class CheckResult:
    """Outcome of a shape check: truthiness plus the first violation."""

    def __init__(self, ok, clause=None, order=None, detail=""):
        self.ok = ok
        self.clause = clause
        self.order = order
        self.detail = detail

    def __bool__(self):
        return self.ok

    def __repr__(self):
        if self.ok:
            return "CheckResult(TRUE)"
        return f"CheckResult(FALSE, clause={self.clause}, order={self.order}: {self.detail})"


def _hcp_component(comp, q):
    if isinstance(comp, HcpForm):
        if q % comp.k and comp.has_a():
            return None
        return comp
    if isinstance(comp, CanonicalComponent) and comp.cap is None:
        return canonical_to_hcp(comp, q)
    return None


def condition_aq(P: TruncatedOp, q: int, kbound: int) -> CheckResult:
    """The four-clause shape test; reports the first violated clause from the top down."""
    if P.is_zero():
        return CheckResult(False, 4, None, "zero operator has no symbol")
    top = P.top
    for m in P.orders():
        comp = _hcp_component(P.components[m], q)
        if comp is None:
            return CheckResult(False, 1, m, "component is not an HCP of Hcpc(q)")
        ok, witness = is_totally_free_of_b(comp)
        if not ok:
            return CheckResult(False, 2, m, f"not totally free of B_j: {witness}")
        if m == top:
            if comp.has_a():
                return CheckResult(False, 4, m, "symbol contains A_i")
            if comp.sdeg_a() != kbound:
                return CheckResult(False, 4, m, f"symbol has Sdeg_A {comp.sdeg_a()} != {kbound}")
        elif comp.sdeg_a() >= (top - m) + kbound:
            return CheckResult(False, 3, m,
                               f"Sdeg_A {comp.sdeg_a()} >= {(top - m) + kbound}")
    return CheckResult(True)


def is_differential(P: TruncatedOp, p: int) -> CheckResult:
    """Differential iff condition A_p(0) holds and no component contains A_i."""
    res = condition_aq(P, p, 0)
    if not res:
        return res
    for m in P.orders():
        comp = _hcp_component(P.components[m], p)
        if comp.has_a():
            return CheckResult(False, "A", m, "component contains A_i")
    return CheckResult(True)

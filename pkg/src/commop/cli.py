"""Command line front end: an expression parser plus one subcommand per pipeline stage.

Exit codes: 0 success, 1 usage or parse error, 2 mathematical failure,
3 insufficient precision.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .errors import CommopError, InsufficientPrecision, InvalidIndex, MissingRootIndex
from .hcpc import NEG_INF, HcpForm, is_totally_free_of_b
from .normalform import char_poly, normal_form, normalize_nf, phi_hat, psi_matrix
from .opcore import (TruncatedOp, differential_operator, extend_stationary_kdv, hcp_to_canonical,
                     to_differential)
from .scalar import CycScalar, cyc_power_of_xi
from .schur import NormalizedDiffOp, is_differential, schur_operator

EXIT_OK, EXIT_USAGE, EXIT_MATH, EXIT_PRECISION = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# syntax tree

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Atom:
    name: str                 # zeta, x, d, int, delta, G, A, B
    index: Optional[int] = None


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: int


@dataclass(frozen=True)
class Prod:
    factors: Tuple["Node", ...]


@dataclass(frozen=True)
class Sum:
    terms: Tuple[Tuple[int, "Node"], ...]   # (sign, term)


Node = Union[Num, Atom, Pow, Prod, Sum]


class ParseError(CommopError, ValueError):
    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
        exp = f"; expected one of {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"line {line}, column {column}: {message}{exp}")


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<num>\d+)
  | (?P<idx>[GAB]_\d+)
  | (?P<word>zeta|delta|int|x|d)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)

_ATOM_START = {"number", "zeta", "x", "d", "int", "delta", "G_i", "A_i", "B_j", "("}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        if text[pos] == "#":
            end = text.find("\n", pos)
            end = len(text) if end < 0 else end
            col += end - pos
            pos = end
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col, _ATOM_START)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            if kind == "word" and m.end() < len(text) and (text[m.end()].isalnum() or text[m.end()] == "_"):
                tail = re.match(r"\w+", text[pos:]).group()
                raise ParseError(f"unknown name {tail!r}", line, col, _ATOM_START)
            toks.append(_Tok(kind if kind != "word" else s, s, line, col))
        for ch in s:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    toks.append(_Tok("end", "", line, col))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        tok = self.peek()
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {what}", tok.line, tok.col, expected)

    def starts_atom(self, tok):
        return tok.kind in ("num", "idx", "zeta", "x", "d", "int", "delta") or tok.text == "("

    def expr(self):
        terms = []
        sign = 1
        if self.peek().text in "+-" and self.peek().kind == "op":
            sign = -1 if self.take().text == "-" else 1
        terms.append((sign, self.term()))
        while self.peek().kind == "op" and self.peek().text in "+-":
            sign = -1 if self.take().text == "-" else 1
            terms.append((sign, self.term()))
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return Sum(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.take()
                factors.append(self.factor())
            elif self.starts_atom(tok):
                factors.append(self.factor())
            else:
                break
        return factors[0] if len(factors) == 1 else Prod(tuple(factors))

    def factor(self):
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            tok = self.peek()
            if tok.kind != "num":
                self.fail({"uint"})
            self.take()
            return Pow(base, int(tok.text))
        return base

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            value = Fraction(int(tok.text))
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "/":
                self.take()
                den = self.peek()
                if den.kind != "num" or int(den.text) == 0:
                    self.fail({"posint"})
                self.take()
                value /= int(den.text)
            return Num(value)
        if tok.kind == "idx":
            self.take()
            name, idx = tok.text.split("_")
            return Atom(name, int(idx))
        if tok.kind in ("zeta", "x", "d", "int", "delta"):
            self.take()
            return Atom(tok.kind)
        if tok.kind == "op" and tok.text == "(":
            self.take()
            inner = self.expr()
            if not (self.peek().kind == "op" and self.peek().text == ")"):
                self.fail({")", "+", "-", "*", "^"} | _ATOM_START)
            self.take()
            return inner
        self.fail(_ATOM_START)


def parse_operator(text: str) -> Node:
    """Parse the expression grammar into a syntax tree."""
    p = _Parser(text)
    if p.peek().kind == "end":
        p.fail(_ATOM_START)
    node = p.expr()
    if p.peek().kind != "end":
        p.fail({"+", "-", "*", "^"} | _ATOM_START)
    return node


def ast_to_text(node: Node) -> str:
    """Print a syntax tree; parsing the result gives the same tree."""
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Atom):
        return f"{node.name}_{node.index}" if node.index is not None else node.name
    if isinstance(node, Pow):
        inner = ast_to_text(node.base)
        if not isinstance(node.base, (Atom,)) and not (isinstance(node.base, Num)
                                                       and node.base.value.denominator == 1):
            inner = f"({inner})"
        return f"{inner}^{node.exp}"
    if isinstance(node, Prod):
        parts = []
        for f in node.factors:
            s = ast_to_text(f)
            if isinstance(f, (Sum, Prod)) or (isinstance(f, Num) and f.value.denominator != 1):
                s = f"({s})"
            parts.append(s)
        return " ".join(parts)
    out = []
    for n, (sign, t) in enumerate(node.terms):
        s = ast_to_text(t)
        if isinstance(t, Sum):
            s = f"({s})"
        if n == 0:
            out.append("- " + s if sign < 0 else s)
        else:
            out.append(("- " if sign < 0 else "+ ") + s)
    return " ".join(out)


def evaluate(node: Node, k: Optional[int]) -> TruncatedOp:
    """Evaluate a syntax tree to an exact operator over Hcpc(k)."""
    kk = k or 1
    if isinstance(node, Num):
        return TruncatedOp.scalar(kk, node.value)
    if isinstance(node, Atom):
        name, i = node.name, node.index
        if name in ("zeta", "A") and k is None:
            raise MissingRootIndex(f"{name} needs --k")
        if name == "zeta":
            return TruncatedOp.scalar(kk, cyc_power_of_xi(kk, 1))
        if name == "x":
            return TruncatedOp(kk, {-1: HcpForm(kk, -1, {(0, 1): 1})})
        if name == "d":
            return TruncatedOp(kk, {1: HcpForm.monomial(kk, 1)})
        if name == "int":
            return TruncatedOp(kk, {-1: HcpForm.monomial(kk, -1)})
        if name == "delta":
            return TruncatedOp(kk, {0: HcpForm.b_monomial(kk, 0, 1)})
        if name == "G":
            return TruncatedOp(kk, {0: HcpForm(kk, 0, {(0, i): 1})})
        if name == "A":
            if not 0 <= i < kk:
                raise InvalidIndex(f"A_{i} needs 0 <= i < k = {kk}")
            return TruncatedOp(kk, {0: HcpForm.monomial(kk, 0, 1, i=i)})
        if i < 1:
            raise InvalidIndex(f"B_{i} needs j >= 1")
        return TruncatedOp(kk, {0: HcpForm.b_monomial(kk, 0, i)})
    if isinstance(node, Pow):
        return evaluate(node.base, k) ** node.exp
    if isinstance(node, Prod):
        out = evaluate(node.factors[0], k)
        for f in node.factors[1:]:
            out = out * evaluate(f, k)
        return out
    out = TruncatedOp(kk, {})
    for sign, t in node.terms:
        v = evaluate(t, k)
        out = out + v if sign > 0 else out - v
    return out


def read_operator(source: str, k: Optional[int], xprec: Optional[int] = None) -> TruncatedOp:
    """Parse a file path or inline expression.

    With ``xprec`` a differential operator's coefficients are treated as
    known only modulo x^xprec, which sets the operator's floor.
    """
    text = source
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    op = evaluate(parse_operator(text), k)
    if xprec is None:
        return op
    try:
        coeffs = to_differential(op)
    except ValueError:
        return op
    return differential_operator({b: s.truncate(xprec) for b, s in coeffs.items()}, op.k)


# ---------------------------------------------------------------------------
# rendering

def _scalar_json(c: CycScalar):
    return [str(Fraction(v)) for v in c.coeffs] or ["0"]


def operator_json(op: TruncatedOp) -> dict:
    comps = []
    for m in op.orders():
        comp = op.components[m]
        comps.append({
            "order": m,
            "ga": [{"i": i, "l": l, "re": _scalar_json(c)} for (i, l), c in comp.sorted_ga()],
            "b": [{"j": j, "re": _scalar_json(c)} for j, c in comp.sorted_b()],
        })
    return {"k": op.k, "components": comps, "floor": None if op.floor == NEG_INF else op.floor}


def render_operator(op: TruncatedOp, form: str, xcap: int) -> str:
    if form == "canonical":
        lines = []
        for m in op.orders():
            canon = hcp_to_canonical(op.components[m], xcap)
            lines.append(f"[{m}] {canon.to_text()}")
        if op.floor != NEG_INF:
            lines.append(f"[< {op.floor}] unknown")
        return "\n".join(lines) if lines else "0"
    if form == "vector":
        return phi_hat(op).to_text()
    if form == "matrix":
        return psi_matrix(phi_hat(op)).to_text()
    return op.to_text()


# ---------------------------------------------------------------------------
# commands

def _normal_form(args):
    Qop = read_operator(args.q, args.k, args.xprec)
    Q = NormalizedDiffOp.from_operator(Qop)
    P = read_operator(args.p, args.k, args.xprec)
    depth = args.depth if args.depth is not None else P.top + Q.q
    return normal_form(P, Q, depth), Q.q


def cmd_schur(args, out):
    Q = NormalizedDiffOp.from_operator(read_operator(args.q, args.k, args.xprec))
    depth = args.depth if args.depth is not None else 8
    S = schur_operator(Q, depth).base
    if args.json:
        out(json.dumps(operator_json(S)))
    else:
        out(render_operator(S, "gform" if args.form in ("vector", "matrix") else args.form,
                            args.xprec or depth))
    return EXIT_OK


def cmd_normal_form(args, out):
    Pp, _ = _normal_form(args)
    if args.json:
        out(json.dumps(operator_json(Pp)))
    else:
        out(render_operator(Pp, args.form, args.xprec or 8))
    return EXIT_OK


def cmd_normalize(args, out):
    Pp, q = _normal_form(args)
    if not Pp.is_exact():
        raise InsufficientPrecision("normal form is not exact at this depth")
    N = normalize_nf(Pp, q)
    if args.json:
        out(json.dumps({"operator": operator_json(N.op),
                        "coordinates": [{"l": l, "j": j, "re": _scalar_json(c)}
                                        for l, j, c in N.coordinates]}))
    else:
        out(render_operator(N.op, args.form, args.xprec or 8))
        out(N.coordinates_text())
    return EXIT_OK


def _matrix(args):
    Pp, _ = _normal_form(args)
    if not Pp.is_exact():
        raise InsufficientPrecision("normal form is not exact at this depth")
    return psi_matrix(phi_hat(Pp))


def cmd_matrix(args, out):
    M = _matrix(args)
    if args.json:
        out(json.dumps({"k": M.k, "entries": [[{str(e): _scalar_json(c) for e, c in sorted(p.items())}
                                                for p in row] for row in M.entries]}))
    else:
        out(M.to_text())
    return EXIT_OK


def cmd_bc_poly(args, out):
    f = char_poly(_matrix(args))
    if args.json:
        out(json.dumps({"terms": [{"lambda": a, "W": b, "re": _scalar_json(c)}
                                  for (a, b), c in sorted(f.terms.items(), reverse=True)]}))
    else:
        out(f.to_text())
    return EXIT_OK


def cmd_check(args, out):
    what = args.what
    ops = [read_operator(src, args.k, args.xprec) for src in args.files]
    if what == "commute":
        if len(ops) != 2:
            raise _Usage("check commute needs two operators")
        P, Q = ops
        R = P * Q - Q * P
        ok = R.is_zero()
        witness = None if ok else f"[P, Q] has a nonzero component at order {R.top}: {R[R.top].to_text()}"
        note = "" if R.is_exact() else f" (checked down to order {R.floor})"
    elif what == "differential":
        if len(ops) != 1:
            raise _Usage("check differential needs one operator")
        res = is_differential(ops[0], max(ops[0].k, 2))
        ok, note = bool(res), ""
        witness = None if ok else f"clause {res.clause} at order {res.order}: {res.detail}"
    else:
        ok, witness, note = True, None, ""
        for op in ops:
            for m in op.orders():
                flag, w = is_totally_free_of_b(op.components[m])
                if not flag:
                    ok, witness = False, f"order {m}: {w}"
                    break
            if not ok:
                break
    if args.json:
        out(json.dumps({"result": ok, "witness": witness}))
    else:
        out(("TRUE" if ok else "FALSE") + note)
        if witness:
            out(witness)
    return EXIT_OK if ok else EXIT_MATH


def cmd_kdv(args, out):
    u = extend_stationary_kdv(Fraction(args.u0), Fraction(args.u1), Fraction(args.u2), args.n)
    if args.json:
        out(json.dumps({"precision": u.precision,
                        "coeffs": {str(d): str(c) for d, c in sorted(u.coeffs.items())}}))
    else:
        text = u.to_text()
        out(text.rsplit(" + O(", 1)[0])
        out(f"# known modulo x^{u.precision}")
    return EXIT_OK


class _Usage(Exception):
    pass


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=None, help="root index for A_i and zeta")
    common.add_argument("--depth", type=int, default=None, help="number of orders below the top")
    common.add_argument("--xprec", type=int, default=None,
                        help="coefficients are known modulo x^XPREC")
    common.add_argument("--form", choices=["gform", "canonical", "vector", "matrix"], default="gform")
    common.add_argument("--json", action="store_true")

    ap = argparse.ArgumentParser(prog="commop", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("schur", parents=[common], help="Schur operator of a normalized Q")
    s.add_argument("q")
    s.set_defaults(func=cmd_schur)
    for name, func, helptext in (("normal-form", cmd_normal_form, "P' = S^-1 P S"),
                                 ("normalize", cmd_normalize, "normalized normal form and coordinates"),
                                 ("matrix", cmd_matrix, "matrix form of the normal form"),
                                 ("bc-poly", cmd_bc_poly, "characteristic polynomial in lambda, W")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("p")
        s.add_argument("q")
        s.set_defaults(func=func)
    s = sub.add_parser("check", parents=[common], help="boolean checks with a witness")
    s.add_argument("what", choices=["commute", "differential", "totally-free"])
    s.add_argument("files", nargs="+")
    s.set_defaults(func=cmd_check)
    s = sub.add_parser("kdv-series", parents=[common], help="stationary KdV coefficient series")
    s.add_argument("u0")
    s.add_argument("u1")
    s.add_argument("u2")
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_kdv)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    out = print
    try:
        if args.depth is not None and args.depth < 1:
            raise _Usage("--depth must be positive")
        return args.func(args, out)
    except (_Usage, ParseError, MissingRootIndex, InvalidIndex) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientPrecision as exc:
        print(f"InsufficientPrecision: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except CommopError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())

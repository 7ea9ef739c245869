"""Metric-entry expression language: parsing, printing, jet evaluation.

Grammar (EBNF, also documented in the README):

    expr     = term { ("+" | "-") term } ;
    term     = unary { ("*" | "/") unary } ;
    unary    = "-" unary | power ;
    power    = atom { "^" intexp } ;          (* right associative *)
    atom     = NUMBER | "i" | COORD | FUNC "(" expr ")" | "(" expr ")" ;
    intexp   = [ "-" ] DIGITS ;
    FUNC     = "exp" | "ln" | "sqrt" | "conj" | "re" | "im" | "abs2" ;
    COORD    = "z" DIGITS ;                   (* 1-based, index <= n *)

"^" binds tighter than unary minus, so "-z1^2" is "-(z1^2)".  Chained
exponents fold right-associatively over the integer exponents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DegenerateMetricError,
    MetricSyntaxError,
    OutOfDomainError,
)
from .jets import Jet2, JetMatrix

FUNCTIONS = ("exp", "ln", "sqrt", "conj", "re", "im", "abs2")

HERMITIAN_TOL = 1e-10
MIN_EIGENVALUE = 1e-10


# ----------------------------------------------------------------------
# AST
@dataclass(frozen=True)
class Lit:
    value: complex


@dataclass(frozen=True)
class Coord:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Lit | Coord | Neg | BinOp | Pow | Call


# ----------------------------------------------------------------------
# tokenizer
_OPS = set("+-*/^()")


@dataclass
class _Token:
    kind: str  # NUMBER | IDENT | OP | END
    text: str
    offset: int
    value: float = 0.0


def _tokenize(src):
    tokens = []
    i = 0
    m = len(src)
    while i < m:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            tokens.append(_Token("OP", c, i))
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < m and src[i + 1].isdigit()):
            j = i
            while j < m and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < m and src[j] in "eE":
                k = j + 1
                if k < m and src[k] in "+-":
                    k += 1
                if k < m and src[k].isdigit():
                    j = k
                    while j < m and src[j].isdigit():
                        j += 1
            text = src[i:j]
            try:
                val = float(text)
            except ValueError:
                raise MetricSyntaxError(f"malformed number {text!r}", i) from None
            tokens.append(_Token("NUMBER", text, i, val))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < m and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(_Token("IDENT", src[i:j], i))
            i = j
            continue
        raise MetricSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(_Token("END", "", m))
    return tokens


# ----------------------------------------------------------------------
# parser
class _Parser:
    def __init__(self, src, n):
        self.src = src
        self.n = n
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        tok = self.peek()
        if tok.kind == "OP" and tok.text == op:
            return self.advance()
        raise MetricSyntaxError(
            f"found {tok.text or 'end of input'!r}", tok.offset, expected=[op]
        )

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok.kind != "END":
            raise MetricSyntaxError(
                f"trailing input {tok.text!r}", tok.offset, expected=["end of input"]
            )
        return e

    def expr(self):
        e = self.term()
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.text in "+-":
                self.advance()
                e = BinOp(tok.text, e, self.term())
            else:
                return e

    def term(self):
        e = self.unary()
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.text in "*/":
                self.advance()
                e = BinOp(tok.text, e, self.unary())
            else:
                return e

    def unary(self):
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        exponents = []
        while True:
            tok = self.peek()
            if tok.kind == "OP" and tok.text == "^":
                self.advance()
                exponents.append(self.intexp())
            else:
                break
        if not exponents:
            return base
        # fold right-associatively over the integer exponents
        k = exponents[-1]
        for e in reversed(exponents[:-1]):
            k = e**k
        return Pow(base, k)

    def intexp(self):
        sign = 1
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "-":
            self.advance()
            sign = -1
        tok = self.peek()
        if tok.kind != "NUMBER" or not float(tok.value).is_integer() or "." in tok.text:
            raise MetricSyntaxError(
                f"found {tok.text or 'end of input'!r}",
                tok.offset,
                expected=["integer exponent"],
            )
        self.advance()
        return sign * int(tok.value)

    def atom(self):
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            return Lit(complex(tok.value))
        if tok.kind == "OP" and tok.text == "(":
            self.advance()
            e = self.expr()
            self.expect_op(")")
            return e
        if tok.kind == "IDENT":
            name = tok.text
            if name == "i":
                self.advance()
                return Lit(1j)
            if name in FUNCTIONS:
                self.advance()
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(name, arg)
            if name.startswith("z") and name[1:].isdigit():
                idx = int(name[1:])
                if idx < 1 or idx > self.n:
                    raise MetricSyntaxError(
                        f"coordinate {name} exceeds chart dimension n={self.n}",
                        tok.offset,
                    )
                self.advance()
                return Coord(idx)
            raise MetricSyntaxError(f"unknown identifier {name!r}", tok.offset)
        raise MetricSyntaxError(
            f"found {tok.text or 'end of input'!r}",
            tok.offset,
            expected=["number", "identifier", "("],
        )


def parse(src, n):
    """Parse an expression over coordinates z1..zn."""
    return _Parser(src, n).parse()


# ----------------------------------------------------------------------
# printer (precedence aware; parse(print(e)) == e)
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "pow": 4, "atom": 5}


def _fmt_number(x):
    if x == int(x):
        return str(int(x))
    return repr(x)


def _print(e, parent_prec):
    if isinstance(e, Lit):
        v = e.value
        if v == 1j:
            return "i", _PREC["atom"]
        if v.imag == 0 and v.real >= 0:
            return _fmt_number(v.real), _PREC["atom"]
        if v.imag == 0:
            # negative real literal prints as a negation
            return f"-{_fmt_number(-v.real)}", _PREC["neg"]
        return f"({_fmt_number(v.real)} + {_fmt_number(v.imag)}*i)", _PREC["atom"]
    if isinstance(e, Coord):
        return f"z{e.index}", _PREC["atom"]
    if isinstance(e, Neg):
        inner, prec = _print(e.arg, _PREC["neg"])
        if prec < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}", _PREC["neg"]
    if isinstance(e, BinOp):
        my = _PREC[e.op]
        lhs, lp = _print(e.left, my)
        rhs, rp = _print(e.right, my)
        if lp < my:
            lhs = f"({lhs})"
        # binary operators parse left-associatively, so a right operand of
        # equal precedence always needs parentheses to keep the tree shape
        if rp <= my:
            rhs = f"({rhs})"
        return f"{lhs} {e.op} {rhs}", my
    if isinstance(e, Pow):
        base, bp = _print(e.base, _PREC["pow"])
        if bp <= _PREC["pow"]:
            base = f"({base})"
        return f"{base}^{e.exponent}", _PREC["pow"]
    if isinstance(e, Call):
        inner, _ = _print(e.arg, 0)
        return f"{e.fn}({inner})", _PREC["atom"]
    raise TypeError(f"not an expression node: {e!r}")


def to_source(e):
    """Render an AST back to parseable text."""
    return _print(e, 0)[0]


# ----------------------------------------------------------------------
# evaluation
def eval_expr(e, point, n=None):
    """Evaluate an expression to an order-2 jet at ``point`` in C^n."""
    point = np.asarray(point, dtype=complex)
    if n is None:
        n = len(point)
    return _eval(e, point, n)


def _eval(e, point, n):
    if isinstance(e, Lit):
        return Jet2.constant(e.value, n)
    if isinstance(e, Coord):
        return Jet2.coordinate(e.index - 1, point[e.index - 1], n)
    if isinstance(e, Neg):
        return -_eval(e.arg, point, n)
    if isinstance(e, BinOp):
        a = _eval(e.left, point, n)
        b = _eval(e.right, point, n)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        return a / b
    if isinstance(e, Pow):
        return _eval(e.base, point, n).powi(e.exponent)
    if isinstance(e, Call):
        a = _eval(e.arg, point, n)
        if e.fn == "exp":
            return a.exp()
        if e.fn == "ln":
            return a.log()
        if e.fn == "sqrt":
            return a.sqrt()
        if e.fn == "conj":
            return a.conj()
        if e.fn == "re":
            return a.re()
        if e.fn == "im":
            return a.im()
        return a.abs2()
    raise TypeError(f"not an expression node: {e!r}")


def eval_value(e, point, n=None):
    """Value-only evaluation (used by finite-difference oracles)."""
    return eval_expr(e, point, n).value


# ----------------------------------------------------------------------
# metric fields
DEFAULT_BOX = (-0.9, 0.9, -0.9, 0.9)


@dataclass
class MetricField:
    """An n x n Hermitian matrix of expressions g_{i jbar}(z, zbar).

    ``constraints`` are expressions whose real part must be positive at
    every admissible point.  ``box`` gives a per-coordinate sampling
    rectangle (re_lo, re_hi, im_lo, im_hi).
    """

    name: str
    n: int
    entries: list  # n x n nested list of Expr
    constraints: list = field(default_factory=list)
    box: Optional[list] = None

    def __post_init__(self):
        if len(self.entries) != self.n or any(len(r) != self.n for r in self.entries):
            raise ValueError("metric entries must form an n x n array")
        if self.box is None:
            self.box = [DEFAULT_BOX] * self.n
        self.box = [tuple(b) for b in self.box]

    @classmethod
    def from_text(cls, name, n, entry_texts, constraint_texts=(), box=None):
        entries = [[parse(entry_texts[i * n + j], n) for j in range(n)] for i in range(n)]
        constraints = [parse(c, n) for c in constraint_texts]
        return cls(name, n, entries, constraints, box)

    def entry_sources(self):
        return [to_source(self.entries[i][j]) for i in range(self.n) for j in range(self.n)]

    def constraint_sources(self):
        return [to_source(c) for c in self.constraints]

    def admissible(self, p):
        p = np.asarray(p, dtype=complex)
        for c in self.constraints:
            if eval_value(c, p, self.n).real <= 0:
                return False
        return True

    def check_point(self, p):
        p = np.asarray(p, dtype=complex)
        for c in self.constraints:
            if eval_value(c, p, self.n).real <= 0:
                raise OutOfDomainError(
                    f"point {p} violates constraint {to_source(c)!r} of metric {self.name!r}"
                )
        return p

    def evaluate(self, p):
        """Hermitian positive-definite jet matrix of the metric at ``p``."""
        p = self.check_point(p)
        rows = []
        for i in range(self.n):
            rows.append([eval_expr(self.entries[i][j], p, self.n) for j in range(self.n)])
        g = JetMatrix(rows)
        herm = g.hermitian_residual()
        if herm > HERMITIAN_TOL:
            raise DegenerateMetricError(
                f"metric {self.name!r} is not Hermitian at {p} (residual {herm:.3e})"
            )
        vals = g.values()
        eigs = np.linalg.eigvalsh((vals + vals.conj().T) / 2)
        if eigs.min() <= MIN_EIGENVALUE:
            raise DegenerateMetricError(
                f"metric {self.name!r} is not positive definite at {p} "
                f"(min eigenvalue {eigs.min():.3e})"
            )
        return g

    def values_at(self, p):
        """Value-only metric matrix (no admissibility or shape checks)."""
        p = np.asarray(p, dtype=complex)
        return np.array(
            [
                [eval_value(self.entries[i][j], p, self.n) for j in range(self.n)]
                for i in range(self.n)
            ],
            dtype=complex,
        )


def conformal_scale(base, u_expr, name=None):
    """Multiply every metric entry by e^{2u} at the expression level."""
    factor = Call("exp", BinOp("*", Lit(2.0 + 0j), u_expr))
    entries = [
        [BinOp("*", factor, base.entries[i][j]) for j in range(base.n)]
        for i in range(base.n)
    ]
    return MetricField(
        name or f"{base.name}_conformal",
        base.n,
        entries,
        list(base.constraints),
        [tuple(b) for b in base.box],
    )

"""Surface syntax for q-algebraic equations.

Grammar (whitespace-insensitive; ASCII):

    equation := expr ("=" expr)? ;
    expr     := term (("+"|"-") term)* ;
    term     := factor (("*"|"/") factor)* ;      # divisor must be constant
    factor   := base ("^" sint)? ;
    base     := number | "q" | "u" | "I" | "rho" | "z" | fapp
              | "(" expr ")" | "-" factor ;
    fapp     := "f" "(" ("q" ("^" sint)? "*")? "z" ("/" "q" ("^" uint)?)? ")" ;
    number   := uint ("/" uint)? ;      sint := ("-")? uint ;

An "=" moves the right side to the left (lhs - rhs = 0); a bare expression
is implicitly "= 0".  Division is allowed only by subexpressions free of z
and f (constants and base powers); dividing by f or z raises a syntax error
with a hint to clear denominators first.  "rho" refers to the field's
quadratic extension element and is rejected when none is declared.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import EquationSyntaxError, FieldError, NonAffineShiftError
from .field import FieldDescriptor, render_scalar
from .gaussian import QI
from .qpoly import QPolynomial


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int

    def merge(self, other: "SourceSpan") -> "SourceSpan":
        if other.start < self.start:
            return other.merge(self)
        return SourceSpan(self.start, max(self.end, other.end), self.line, self.column)


# ----------------------------------------------------------------- AST

@dataclass(frozen=True)
class Node:
    span: SourceSpan


@dataclass(frozen=True)
class Num(Node):
    value: Fraction


@dataclass(frozen=True)
class VarZ(Node):
    pass


@dataclass(frozen=True)
class VarQ(Node):
    pass


@dataclass(frozen=True)
class VarU(Node):
    pass


@dataclass(frozen=True)
class ImagUnit(Node):
    pass


@dataclass(frozen=True)
class Rho(Node):
    pass


@dataclass(frozen=True)
class FApp(Node):
    shift: int


@dataclass(frozen=True)
class Add(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Sub(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Mul(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Div(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class Paren(Node):
    inner: Node


@dataclass(frozen=True)
class EquationAST:
    root: Node
    source: str


# ----------------------------------------------------------------- lexer

_SYMBOLS = "+-*/^()="


@dataclass(frozen=True)
class _Tok:
    kind: str   # "num", "ident", or the symbol itself
    text: str
    span: SourceSpan


def _tokenize(text: str):
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1
            continue
        start, sline, scol = i, line, col
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Tok("num", text[i:j], SourceSpan(start, j, sline, scol)))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            toks.append(_Tok("ident", text[i:j], SourceSpan(start, j, sline, scol)))
            col += j - i
            i = j
            continue
        if ch in _SYMBOLS:
            toks.append(_Tok(ch, ch, SourceSpan(start, i + 1, sline, scol)))
            i += 1
            col += 1
            continue
        raise EquationSyntaxError(f"unexpected character {ch!r}",
                                  SourceSpan(start, i + 1, sline, scol))
    toks.append(_Tok("eof", "", SourceSpan(n, n, line, col)))
    return toks


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, expected=None) -> _Tok:
        t = self.peek()
        if t.kind != kind:
            raise EquationSyntaxError(
                f"expected {expected or kind!r}, found {t.text or 'end of input'!r}",
                t.span, expected=[expected or kind])
        return self.next()

    # equation := expr ("=" expr)?
    def equation(self) -> Node:
        lhs = self.expr()
        if self.peek().kind == "=":
            eq = self.next()
            rhs = self.expr()
            lhs = Sub(lhs.span.merge(rhs.span), lhs, rhs)
            _ = eq
        self.expect("eof", "end of input")
        return lhs

    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind in "+-":
            op = self.next()
            rhs = self.term()
            cls = Add if op.kind == "+" else Sub
            node = cls(node.span.merge(rhs.span), node, rhs)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek().kind in "*/":
            op = self.next()
            rhs = self.factor()
            if op.kind == "/":
                if _mentions_series(rhs):
                    raise EquationSyntaxError(
                        "division by f or z is not allowed",
                        rhs.span,
                        hint="clear denominators first (multiply the equation through)")
                node = Div(node.span.merge(rhs.span), node, rhs)
            else:
                node = Mul(node.span.merge(rhs.span), node, rhs)
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.peek().kind == "^":
            self.next()
            e, espan = self.sint()
            node = Pow(node.span.merge(espan), node, e)
        return node

    def sint(self):
        neg = False
        t = self.peek()
        first = t.span
        if t.kind == "-":
            self.next()
            neg = True
        numt = self.expect("num", "integer exponent")
        val = int(numt.text)
        return (-val if neg else val), first.merge(numt.span)

    def base(self) -> Node:
        t = self.peek()
        if t.kind == "num":
            self.next()
            val = Fraction(int(t.text))
            span = t.span
            # number := uint ("/" uint)?  -- only when directly adjacent
            if self.peek().kind == "/" and self.toks[self.pos + 1].kind == "num":
                self.next()
                den = self.next()
                if int(den.text) == 0:
                    raise EquationSyntaxError("division by zero", den.span)
                val = val / int(den.text)
                span = span.merge(den.span)
            return Num(span, val)
        if t.kind == "ident":
            if t.text == "q":
                self.next()
                return VarQ(t.span)
            if t.text == "u":
                self.next()
                return VarU(t.span)
            if t.text == "I":
                self.next()
                return ImagUnit(t.span)
            if t.text == "rho":
                self.next()
                return Rho(t.span)
            if t.text == "z":
                self.next()
                return VarZ(t.span)
            if t.text == "f":
                return self.fapp()
            raise EquationSyntaxError(f"unknown name {t.text!r}", t.span,
                                      expected=["q", "u", "I", "rho", "z", "f"])
        if t.kind == "(":
            self.next()
            inner = self.expr()
            close = self.expect(")", "closing parenthesis")
            return Paren(t.span.merge(close.span), inner)
        if t.kind == "-":
            self.next()
            op = self.factor()
            return Neg(t.span.merge(op.span), op)
        raise EquationSyntaxError(
            f"expected a value, found {t.text or 'end of input'!r}", t.span,
            expected=["number", "q", "u", "I", "rho", "z", "f", "("])

    def fapp(self) -> Node:
        f = self.expect("ident")
        open_ = self.expect("(", "'('")
        j = 0
        t = self.peek()
        if t.kind == "ident" and t.text == "q":
            self.next()
            if self.peek().kind == "^":
                self.next()
                e, _ = self.sint()
                j += e
            else:
                j += 1
            star = self.peek()
            if star.kind != "*":
                raise NonAffineShiftError(
                    "argument of f must have the form q^j*z",
                    star.span, hint="write f(q^j*z), f(z) or f(z/q^j)")
            self.next()
            t = self.peek()
        if not (t.kind == "ident" and t.text == "z"):
            raise NonAffineShiftError(
                "argument of f must have the form q^j*z", t.span,
                hint="write f(q^j*z), f(z) or f(z/q^j)")
        self.next()
        if self.peek().kind == "/":
            self.next()
            qt = self.peek()
            if not (qt.kind == "ident" and qt.text == "q"):
                raise NonAffineShiftError(
                    "argument of f must have the form q^j*z", qt.span,
                    hint="only division by a power of q is allowed inside f(...)")
            self.next()
            if self.peek().kind == "^":
                self.next()
                numt = self.expect("num", "positive exponent")
                j -= int(numt.text)
            else:
                j -= 1
        if self.peek().kind != ")":
            raise NonAffineShiftError(
                "argument of f must have the form q^j*z", self.peek().span,
                hint="write f(q^j*z), f(z) or f(z/q^j)")
        close = self.next()
        return FApp(f.span.merge(close.span), j)


def _mentions_series(node: Node) -> bool:
    if isinstance(node, (VarZ, FApp)):
        return True
    for attr in ("left", "right", "operand", "inner", "base"):
        child = getattr(node, attr, None)
        if isinstance(child, Node) and _mentions_series(child):
            return True
    return False


def parse_equation(text: str) -> EquationAST:
    """Parse source text into an AST with source spans on every node."""
    if not text.strip():
        raise EquationSyntaxError("empty input", SourceSpan(0, 0, 1, 1),
                                  expected=["expression"])
    return EquationAST(_Parser(text).equation(), text)


# --------------------------------------------------------- canonicalizer

def canonicalize(ast: EquationAST, fd: FieldDescriptor) -> QPolynomial:
    """Expand the AST into a collected sparse polynomial over the field."""
    return _canon(ast.root, fd)


def _const_poly(fd: FieldDescriptor, scalar) -> QPolynomial:
    return QPolynomial(fd, {(0, ()): scalar})


def _canon(node: Node, fd: FieldDescriptor) -> QPolynomial:
    if isinstance(node, Num):
        return _const_poly(fd, fd.from_qi(QI(node.value)))
    if isinstance(node, VarQ):
        return _const_poly(fd, fd.base_power(1))
    if isinstance(node, VarU):
        if fd.specialized is not None:
            raise FieldError("bare u is not representable in a specialized field")
        return _const_poly(fd, fd.u_power(1))
    if isinstance(node, ImagUnit):
        return _const_poly(fd, fd.i())
    if isinstance(node, Rho):
        if fd.ext_d is None:
            raise FieldError("field has no quadratic extension for rho")
        return _const_poly(fd, fd.rho())
    if isinstance(node, VarZ):
        return QPolynomial(fd, {(1, ()): fd.one()})
    if isinstance(node, FApp):
        return QPolynomial(fd, {(0, (node.shift,)): fd.one()})
    if isinstance(node, Paren):
        return _canon(node.inner, fd)
    if isinstance(node, Neg):
        return -_canon(node.operand, fd)
    if isinstance(node, Add):
        return _canon(node.left, fd) + _canon(node.right, fd)
    if isinstance(node, Sub):
        return _canon(node.left, fd) - _canon(node.right, fd)
    if isinstance(node, Mul):
        return _canon(node.left, fd) * _canon(node.right, fd)
    if isinstance(node, Div):
        divisor = _canon(node.right, fd)
        s = _as_scalar(divisor, node.right.span)
        if s.is_zero():
            raise FieldError("division by the zero constant")
        return _canon(node.left, fd).scalar_mul(s.inv())
    if isinstance(node, Pow):
        if node.exponent >= 0:
            return _canon(node.base, fd) ** node.exponent
        inner = _canon(node.base, fd)
        s = _as_scalar(inner, node.base.span)
        if s.is_zero():
            raise FieldError("negative power of zero")
        return _const_poly(fd, s.inv() ** (-node.exponent))
    raise AssertionError(f"unhandled node {node!r}")


def _as_scalar(p: QPolynomial, span: SourceSpan):
    if p.is_zero():
        return p.fd.zero()
    if list(p.terms) == [(0, ())]:
        return p.terms[(0, ())]
    raise EquationSyntaxError(
        "negative powers and division require a constant subexpression",
        span, hint="clear denominators first (multiply the equation through)")


def parse_to_poly(text: str, fd: FieldDescriptor) -> QPolynomial:
    return canonicalize(parse_equation(text), fd)


# ------------------------------------------------------------- rendering

def _fapp_str(j: int, mult: int) -> str:
    if j == 0:
        s = "f(z)"
    elif j == 1:
        s = "f(q*z)"
    elif j == -1:
        s = "f(z/q)"
    else:
        s = f"f(q^{j}*z)"
    return s if mult == 1 else f"{s}^{mult}"


def _coeff_factor(c) -> tuple:
    """(sign, factor-string or None).  None means the factor is 1."""
    s = render_scalar(c)
    sign = 1
    if s == "1":
        return 1, None
    if s == "-1":
        return -1, None
    if _toplevel_plusminus(s):
        return 1, f"({s})"
    if s.startswith("-") and not _toplevel_plusminus(s[1:]):
        return -1, (None if s[1:] == "1" else s[1:])
    return 1, s


def _toplevel_plusminus(s: str) -> bool:
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > 0 and s[i - 1] == " ":
            return True
    return False


def render(p: QPolynomial, format: str = "canonical") -> str:
    """Deterministic serialization; ``canonical`` round-trips through
    parse_equation + canonicalize."""
    if format == "json":
        return json.dumps(p.to_json(), sort_keys=False)
    if format not in ("human", "canonical"):
        raise ValueError(f"unknown format {format!r}")
    if p.is_zero():
        return "0"
    parts = []
    for (a, shifts), c in p.sorted_terms():
        sign, cf = _coeff_factor(c)
        factors = []
        if cf is not None:
            factors.append(cf)
        if a == 1:
            factors.append("z")
        elif a > 1:
            factors.append(f"z^{a}")
        mult = {}
        for j in shifts:
            mult[j] = mult.get(j, 0) + 1
        for j in sorted(mult):
            factors.append(_fapp_str(j, mult[j]))
        if not factors:
            factors.append("1")
        parts.append((sign, "*".join(factors)))
    sign, text = parts[0]
    out = ("-" if sign < 0 else "") + text
    for sign, text in parts[1:]:
        out += (" - " if sign < 0 else " + ") + text
    return out

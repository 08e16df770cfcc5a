"""Coefficient fields: Q(i)(u) with u a formal root of the base (base = u^D),
one optional quadratic extension rho^2 = d, and arbitrary-precision complex
numerics.

The exact scalar is a pair A(u) + B(u)*rho of rational functions stored as
reduced fractions of Gaussian-integer-coefficient polynomials.  The canonical
form (coprime, joint content 1, denominator leading coefficient in the
half-open first quadrant) makes equality structural.

Descriptors also track ``base_exp``: the current equation base as a power of
the original q.  Ramification divides it, deflation multiplies it, so the
order of u over the original q is D / base_exp and a ramify/deflate round
trip restores the descriptor exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from . import upoly as up
from .errors import (AlreadyExtended, DivisionByZero, FieldError, MixedField,
                     PoleError)
from .gaussian import QI, QI_I, QI_ONE, QI_ZERO, gaussian_int_gcd


# ---------------------------------------------------------------------------
# rational functions in u
# ---------------------------------------------------------------------------

class RatFunc:
    """A reduced fraction num/den of polynomials in u over Q(i)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _canonical=False):
        if den is None:
            den = dict(up.P_ONE)
        if _canonical:
            self.num, self.den = num, den
        else:
            self.num, self.den = _reduce(num, den)

    # -- constructors

    @staticmethod
    def const(c: QI) -> "RatFunc":
        return RatFunc(up.pconst(c))

    @staticmethod
    def monomial(c: QI, e: int) -> "RatFunc":
        if e >= 0:
            return RatFunc(up.pmono(c, e))
        return RatFunc(up.pconst(c), up.pmono(QI_ONE, -e))

    # -- predicates

    def is_zero(self):
        return not self.num

    def is_one(self):
        return self.num == self.den

    def is_constant(self):
        return up.pdegree(self.num) <= 0 and up.pdegree(self.den) <= 0

    def as_qi(self) -> QI:
        if not self.is_constant():
            raise FieldError("not a constant")
        if self.is_zero():
            return QI_ZERO
        return self.num[0] / self.den[0]

    # -- arithmetic

    def __add__(self, o):
        if self.den == o.den:
            return RatFunc(up.padd(self.num, o.num), dict(self.den))
        return RatFunc(up.padd(up.pmul(self.num, o.den), up.pmul(o.num, self.den)),
                       up.pmul(self.den, o.den))

    def __sub__(self, o):
        return self + (-o)

    def __neg__(self):
        return RatFunc(up.pneg(self.num), dict(self.den), _canonical=True)

    def __mul__(self, o):
        return RatFunc(up.pmul(self.num, o.num), up.pmul(self.den, o.den))

    def inv(self):
        if not self.num:
            raise DivisionByZero("1/0 in Q(i)(u)")
        return RatFunc(dict(self.den), dict(self.num))

    def __truediv__(self, o):
        return self * o.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        r = RF_ONE
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    # -- structure

    def __eq__(self, o):
        if not isinstance(o, RatFunc):
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((_pkey(self.num), _pkey(self.den)))

    def sort_key(self):
        return (_pkey(self.num), _pkey(self.den))

    def map_exponents_mul(self, m: int) -> "RatFunc":
        return RatFunc(up.psubst_power(self.num, m), up.psubst_power(self.den, m),
                       _canonical=True)

    def map_exponents_div(self, m: int) -> "RatFunc":
        try:
            return RatFunc(up.pdiv_exponents(self.num, m),
                           up.pdiv_exponents(self.den, m), _canonical=True)
        except ValueError:
            raise FieldError("u-exponent not divisible under deflation")

    def sqrt(self) -> Optional["RatFunc"]:
        """Exact square root in Q(i)(u), or None.

        A reduced fraction is a square iff its monic parts are polynomial
        squares and the ratio of leading coefficients is a square in Q(i).
        """
        if self.is_zero():
            return RF_ZERO
        ln = self.num[up.pdegree(self.num)]
        ld = self.den[up.pdegree(self.den)]
        t = (ln / ld).sqrt()
        if t is None:
            return None
        sn = up.psqrt(up.pmonic(self.num))
        sd = up.psqrt(up.pmonic(self.den))
        if sn is None or sd is None:
            return None
        return RatFunc(up.pscale(sn, t), sd)

    def __repr__(self):
        return f"RatFunc({up.prender(self.num)!r}/{up.prender(self.den)!r})"


def _pkey(p):
    return tuple(sorted((e, c.re, c.im) for e, c in p.items()))


def _reduce(num, den):
    """Canonicalize a fraction of Q(i)-coefficient polynomials."""
    if not den:
        raise DivisionByZero("zero denominator")
    if not num:
        return {}, dict(up.P_ONE)
    # polynomial gcd (cheap paths first)
    if up.pdegree(den) > 0 or up.porder(den) > 0:
        if len(den) == 1:
            k = min(up.porder(num), up.porder(den))
            if k:
                num = up.pshift(num, -k)
                den = up.pshift(den, -k)
        else:
            g = up.pgcd(num, den)
            if up.pdegree(g) > 0:
                num, _ = up.pdivmod(num, g)
                den, _ = up.pdivmod(den, g)
    # clear fraction denominators jointly
    lam = 1
    for p in (num, den):
        for c in p.values():
            lam = lam * c.re.denominator // _igcd(lam, c.re.denominator)
            lam = lam * c.im.denominator // _igcd(lam, c.im.denominator)
    if lam != 1:
        lq = QI(lam)
        num = up.pscale(num, lq)
        den = up.pscale(den, lq)
    # joint Gaussian-integer content
    g = QI_ZERO
    for p in (num, den):
        for c in p.values():
            g = c if g.is_zero() else gaussian_int_gcd(g, c)
            if g.is_one():
                break
        if g.is_one():
            break
    if not g.is_one():
        gi = g.inv()
        num = up.pscale(num, gi)
        den = up.pscale(den, gi)
    # unit normalization: denominator leading coefficient in quadrant
    lead = den[up.pdegree(den)]
    unit = QI_ONE
    cur = lead
    while not (cur.re > 0 and cur.im >= 0):
        cur = cur * QI_I
        unit = unit * QI_I
    if not unit.is_one():
        num = up.pscale(num, unit)
        den = up.pscale(den, unit)
    return num, den


def _igcd(a, b):
    while b:
        a, b = b, a % b
    return a


RF_ZERO = RatFunc(dict(up.P_ZERO))
RF_ONE = RatFunc(dict(up.P_ONE))


# ---------------------------------------------------------------------------
# field descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldDescriptor:
    """Shared context of every scalar: root order, base tracking, extension,
    specialization and mode.

    D          -- positive root order: current base = u^D
    base_exp   -- current base as a power of the original q (ramify divides)
    ext_d      -- rho^2 = ext_d (a RatFunc over the base field), or None
    specialized-- exact Gaussian-rational value of the current base, or None;
                  when set, scalars are constants (u appears only through
                  whole base powers)
    mode       -- "exact" or "numeric"
    prec       -- precision bits (numeric mode)
    qval       -- complex value of the ORIGINAL q (numeric mode), |q| > 1
    """

    D: int = 2
    base_exp: Fraction = Fraction(1)
    ext_d: Optional[RatFunc] = None
    specialized: Optional[QI] = None
    mode: str = "exact"
    prec: int = 0
    qval: object = None

    def __post_init__(self):
        if self.D < 1:
            raise FieldError("root order must be >= 1")
        if self.ext_d is not None and self.ext_d.is_zero():
            raise FieldError("extension by sqrt(0)")
        if self.mode == "numeric":
            if self.prec < 64:
                raise FieldError("numeric precision must be >= 64 bits")
            if abs(complex(self.qval)) <= 1:
                raise FieldError("|q| must be > 1")

    # -- scalar constructors (numeric mode yields NumScalar)

    def zero(self):
        if self.mode == "numeric":
            return NumScalar(self, mpmath.mpc(0))
        return Scalar(self, RF_ZERO, RF_ZERO)

    def one(self):
        if self.mode == "numeric":
            return NumScalar(self, mpmath.mpc(1))
        return Scalar(self, RF_ONE, RF_ZERO)

    def from_qi(self, c: QI):
        if self.mode == "numeric":
            with mpmath.workprec(self.prec):
                return NumScalar(self, mpmath.mpf(c.re.numerator) / c.re.denominator
                                 + mpmath.mpc(0, 1) * c.im.numerator / c.im.denominator)
        return Scalar(self, RatFunc.const(c), RF_ZERO)

    def from_int(self, n: int):
        return self.from_qi(QI(n))

    def from_fraction(self, f):
        return self.from_qi(QI(Fraction(f)))

    def i(self):
        return self.from_qi(QI_I)

    def u_power(self, e: int):
        """u^e; in a specialized field e must be a multiple of D."""
        if self.mode == "numeric":
            u, _ = self.numeric_context()
            with mpmath.workprec(self.prec):
                return NumScalar(self, u ** e)
        if self.specialized is not None:
            if e % self.D:
                raise FieldError("odd root power in specialized field")
            return self.from_qi(self.specialized ** (e // self.D))
        return Scalar(self, RatFunc.monomial(QI_ONE, e), RF_ZERO)

    def base_power(self, j: int):
        """(current base)^j, always representable."""
        return self.u_power(self.D * j)

    def rho(self):
        if self.ext_d is None:
            raise FieldError("field has no quadratic extension")
        if self.mode == "numeric":
            _, r = self.numeric_context()
            return NumScalar(self, r)
        return Scalar(self, RF_ZERO, RF_ONE)

    # -- derived descriptors

    def ramified(self, m: int) -> "FieldDescriptor":
        if self.specialized is not None:
            raise FieldError("cannot ramify a specialized field")
        d = self.ext_d.map_exponents_mul(m) if self.ext_d is not None else None
        return FieldDescriptor(self.D, self.base_exp / m, d, None,
                               self.mode, self.prec, self.qval)

    def deflated(self, m: int) -> "FieldDescriptor":
        if self.specialized is not None:
            raise FieldError("cannot deflate a specialized field")
        d = self.ext_d.map_exponents_div(m) if self.ext_d is not None else None
        return FieldDescriptor(self.D, self.base_exp * m, d, None,
                               self.mode, self.prec, self.qval)

    def specialize(self, base_value: QI) -> "FieldDescriptor":
        """Exact field with the current base fixed to a Gaussian rational."""
        d = None
        if self.ext_d is not None:
            d = RatFunc.const(_specialize_rf(self.ext_d, self.D, base_value))
        return FieldDescriptor(self.D, self.base_exp, d, base_value,
                               "exact", 0, None)

    # -- numeric branch values

    def numeric_context(self, prec: int = 0, qval=None):
        """(u-value, rho-value) at working precision, principal branches.

        u = q^(base_exp/D); in a specialized field the stored exact base
        value is used instead of q.
        """
        prec = prec or self.prec
        if self.specialized is None:
            qval = qval if qval is not None else self.qval
            if not prec or qval is None:
                raise FieldError("numeric evaluation needs precision and q")
        elif not prec:
            raise FieldError("numeric evaluation needs a precision")
        with mpmath.workprec(prec + 32):
            if self.specialized is not None:
                base = (mpmath.mpf(self.specialized.re.numerator) / self.specialized.re.denominator
                        + mpmath.mpc(0, 1) * self.specialized.im.numerator / self.specialized.im.denominator)
                u = mpmath.power(base, mpmath.mpf(1) / self.D)
            else:
                q = mpmath.mpc(qval)
                e = self.base_exp / self.D
                u = mpmath.power(q, mpmath.mpf(e.numerator) / e.denominator)
            rho = None
            if self.ext_d is not None:
                dv = _eval_rf(self.ext_d, u, prec + 32)
                rho = mpmath.sqrt(dv)
        return u, rho


def _specialize_rf(rf: RatFunc, D: int, val: QI) -> QI:
    def ev(p):
        try:
            return up.peval_qi(up.pdiv_exponents(p, D), val)
        except ValueError:
            raise FieldError("odd root power blocks specialization")
    den = ev(rf.den)
    if den.is_zero():
        raise DivisionByZero("denominator vanishes at specialization point")
    return ev(rf.num) / den


def _eval_rf(rf: RatFunc, u, prec):
    with mpmath.workprec(prec):
        num = _eval_poly(rf.num, u)
        den = _eval_poly(rf.den, u)
        if not den or abs(den) < mpmath.mpf(2) ** (-prec + 8) * (1 + abs(u)) ** max(
                up.pdegree(rf.den), 0):
            raise PoleError("denominator evaluates to zero")
        return num / den


def _eval_poly(p, u):
    acc = mpmath.mpc(0)
    for e in sorted(p, reverse=True):
        c = p[e]
        acc += (mpmath.mpf(c.re.numerator) / c.re.denominator
                + mpmath.mpc(0, 1) * mpmath.mpf(c.im.numerator) / c.im.denominator) * u ** e
    return acc


# ---------------------------------------------------------------------------
# exact scalars
# ---------------------------------------------------------------------------

class Scalar:
    """Exact field element A(u) + B(u)*rho."""

    __slots__ = ("fd", "a", "b")

    def __init__(self, fd: FieldDescriptor, a: RatFunc, b: RatFunc = RF_ZERO):
        if not b.is_zero() and fd.ext_d is None:
            raise FieldError("rho component without extension")
        self.fd = fd
        self.a = a
        self.b = b

    # -- predicates

    def is_zero(self):
        return self.a.is_zero() and self.b.is_zero()

    def is_one(self):
        return self.a.is_one() and self.b.is_zero()

    def is_real(self):
        """Real for every real value of the base > 1 (sufficient check)."""
        if not self.b.is_zero():
            return False
        return all(c.is_real() for c in self.a.num.values()) and \
            all(c.is_real() for c in self.a.den.values())

    # -- arithmetic

    def _chk(self, o):
        if not isinstance(o, Scalar):
            raise TypeError(f"cannot combine Scalar with {type(o).__name__}")
        if o.fd != self.fd:
            raise MixedField("operands from different fields")

    def __add__(self, o):
        self._chk(o)
        return Scalar(self.fd, self.a + o.a, self.b + o.b)

    def __sub__(self, o):
        self._chk(o)
        return Scalar(self.fd, self.a - o.a, self.b - o.b)

    def __neg__(self):
        return Scalar(self.fd, -self.a, -self.b)

    def __mul__(self, o):
        self._chk(o)
        if self.b.is_zero() and o.b.is_zero():
            return Scalar(self.fd, self.a * o.a, RF_ZERO)
        d = self.fd.ext_d
        return Scalar(self.fd,
                      self.a * o.a + self.b * o.b * d,
                      self.a * o.b + self.b * o.a)

    def inv(self):
        if self.is_zero():
            raise DivisionByZero("1/0")
        if self.b.is_zero():
            return Scalar(self.fd, self.a.inv(), RF_ZERO)
        nrm = self.a * self.a - self.b * self.b * self.fd.ext_d
        if nrm.is_zero():
            raise DivisionByZero("zero divisor in extension (d is a square?)")
        ni = nrm.inv()
        return Scalar(self.fd, self.a * ni, -(self.b * ni))

    def __truediv__(self, o):
        self._chk(o)
        return self * o.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        r, b = self.fd.one(), self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    # -- structure

    def __eq__(self, o):
        if not isinstance(o, Scalar):
            return NotImplemented
        return self.fd == o.fd and self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def sort_key(self):
        return (self.a.sort_key(), self.b.sort_key())

    def conj_rho(self):
        return Scalar(self.fd, self.a, -self.b)

    def sqrt(self) -> Optional["Scalar"]:
        """Exact square root within the current field, or None."""
        if not self.b.is_zero():
            return None
        s = self.a.sqrt()
        if s is not None:
            return Scalar(self.fd, s, RF_ZERO)
        if self.fd.ext_d is not None:
            t = (self.a / self.fd.ext_d).sqrt()
            if t is not None:
                return Scalar(self.fd, RF_ZERO, t)
        return None

    def sign_for_real_base(self):
        """+1/-1 when the sign is provably constant for every real base > 1,
        else None.  Sufficient criterion: all nonzero coefficients of num
        (resp. den) real and of one sign."""
        if not self.is_real() or self.is_zero():
            return None

        def onesign(p):
            signs = {1 if c.re > 0 else -1 for c in p.values()}
            return signs.pop() if len(signs) == 1 else None

        sn, sd = onesign(self.a.num), onesign(self.a.den)
        if sn is None or sd is None:
            return None
        return sn * sd

    def __repr__(self):
        return f"<Scalar {render_scalar(self)}>"


# ---------------------------------------------------------------------------
# spec operations
# ---------------------------------------------------------------------------

def arith(op: str, x, y=None):
    """Dispatch table mirror of the scalar operator set."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "neg":
        return -x
    if op == "inv":
        return x.inv()
    if op == "pow":
        return x ** y
    raise ValueError(f"unknown op {op!r}")


def adjoin_sqrt(fd: FieldDescriptor, d: Scalar) -> FieldDescriptor:
    """Extend the field by rho with rho^2 = d.

    When d already has a square root in the field (including d = -1, whose
    root is the built-in I), the descriptor is returned unchanged and the
    root is found with :meth:`Scalar.sqrt`.
    """
    if d.is_zero():
        raise FieldError("cannot adjoin sqrt(0)")
    if d.fd.ext_d is not None or not d.b.is_zero():
        raise AlreadyExtended("one quadratic extension only; fall back to numeric mode")
    if fd.ext_d is not None:
        raise AlreadyExtended("one quadratic extension only; fall back to numeric mode")
    if d.sqrt() is not None:
        return fd
    return FieldDescriptor(fd.D, fd.base_exp, d.a, fd.specialized,
                           fd.mode, fd.prec, fd.qval)


def lift(x: Scalar, fd: FieldDescriptor) -> Scalar:
    """Embed a scalar of the unextended field into the extended one."""
    return Scalar(fd, x.a, x.b)


def eval_numeric(x, fd_numeric: FieldDescriptor = None, prec: int = 0, qval=None):
    """Arbitrary-precision complex value of a scalar (principal branches)."""
    if isinstance(x, NumScalar):
        return x.v
    fd = fd_numeric if fd_numeric is not None else x.fd
    prec = prec or fd.prec
    qval = qval if qval is not None else fd.qval
    u, rho = x.fd.numeric_context(prec, qval)
    with mpmath.workprec(prec + 32):
        v = _eval_rf(x.a, u, prec + 32)
        if not x.b.is_zero():
            v += _eval_rf(x.b, u, prec + 32) * rho
        return +v


# ---------------------------------------------------------------------------
# numeric scalars
# ---------------------------------------------------------------------------

class NumScalar:
    """Complex number at descriptor precision (numeric field mode)."""

    __slots__ = ("fd", "v")

    def __init__(self, fd: FieldDescriptor, v):
        self.fd = fd
        self.v = v

    def is_zero(self):
        return self.v == 0

    def is_one(self):
        return self.v == 1

    def _chk(self, o):
        if not isinstance(o, NumScalar) or o.fd != self.fd:
            raise MixedField("operands from different fields")

    def __add__(self, o):
        self._chk(o)
        with mpmath.workprec(self.fd.prec):
            return NumScalar(self.fd, self.v + o.v)

    def __sub__(self, o):
        self._chk(o)
        with mpmath.workprec(self.fd.prec):
            return NumScalar(self.fd, self.v - o.v)

    def __neg__(self):
        return NumScalar(self.fd, -self.v)

    def __mul__(self, o):
        self._chk(o)
        with mpmath.workprec(self.fd.prec):
            return NumScalar(self.fd, self.v * o.v)

    def inv(self):
        if self.v == 0:
            raise DivisionByZero("1/0")
        with mpmath.workprec(self.fd.prec):
            return NumScalar(self.fd, 1 / self.v)

    def __truediv__(self, o):
        self._chk(o)
        return self * o.inv()

    def __pow__(self, n: int):
        with mpmath.workprec(self.fd.prec):
            return NumScalar(self.fd, self.v ** n)

    def __eq__(self, o):
        if not isinstance(o, NumScalar):
            return NotImplemented
        return self.fd == o.fd and self.v == o.v

    def __hash__(self):
        return hash(self.v)

    def sort_key(self):
        return (str(self.v.real), str(self.v.imag))

    def __repr__(self):
        return f"<NumScalar {self.v}>"


# ---------------------------------------------------------------------------
# univariate solving
# ---------------------------------------------------------------------------

@dataclass
class SolveResult:
    roots: list          # [(Scalar, multiplicity)]
    unresolved: Optional[list]   # coefficient list of the residual factor
    fd: FieldDescriptor  # possibly extended


_CANDIDATES = [QI(1), QI(-1), QI(0, 1), QI(0, -1), QI(2), QI(-2),
               QI(Fraction(1, 2)), QI(Fraction(-1, 2)), QI(3), QI(-3),
               QI(Fraction(1, 3)), QI(Fraction(-1, 3)), QI(1, 1), QI(1, -1)]


def solve_univariate(coeffs: list, allow_adjoin: bool = False) -> SolveResult:
    """Roots of sum coeffs[j]*c^j obtainable by elementary extraction.

    Performs, in order: stripping of c^m (roots at 0), linear factors,
    quadratic factors (in-field square roots, plus one field extension when
    ``allow_adjoin`` and no extension is present yet), and trial deflation
    against a small set of simple candidates.  Whatever remains is returned
    as an unresolved factor; unresolved factors are data, not errors.
    """
    if not coeffs or all(c.is_zero() for c in coeffs):
        raise FieldError("zero polynomial has every scalar as root")
    fd = coeffs[0].fd
    if isinstance(coeffs[0], NumScalar):
        return _solve_numeric(coeffs, fd)
    cs = list(coeffs)
    while cs and cs[-1].is_zero():
        cs.pop()
    roots = []
    m = 0
    while cs and cs[0].is_zero():
        cs.pop(0)
        m += 1
    if m:
        roots.append((fd.zero(), m))

    def add_root(r):
        nonlocal cs
        mult = 0
        while len(cs) > 1:
            quo, rem = _syn_div(cs, r, fd)
            if rem.is_zero():
                cs = quo
                mult += 1
            else:
                break
        if mult:
            roots.append((r, mult))
        return mult

    progress = True
    while len(cs) > 1 and progress:
        progress = False
        deg = len(cs) - 1
        if deg == 1:
            add_root(-(cs[0] / cs[1]))
            progress = True
            continue
        if deg == 2:
            a2, a1, a0 = cs[2], cs[1], cs[0]
            disc = a1 * a1 - fd.from_int(4) * a2 * a0
            s = disc.sqrt()
            if s is None and allow_adjoin and fd.ext_d is None:
                # for a pure c^2 = d equation adjoin d itself so the roots
                # are literally +-rho; otherwise adjoin the discriminant
                d_adj = -(a0 / a2) if a1.is_zero() else disc
                fd2 = adjoin_sqrt(fd, d_adj)
                cs = [lift(c, fd2) for c in cs]
                roots = [(lift(r, fd2), k) for r, k in roots]
                fd = fd2
                a2, a1, a0 = cs[2], cs[1], cs[0]
                s = (a1 * a1 - fd.from_int(4) * a2 * a0).sqrt()
            if s is not None:
                half = (fd.from_int(2) * a2).inv()
                for r in ((-a1 + s) * half, (-a1 - s) * half):
                    add_root(r)
                progress = True
                continue
            break
        # degree >= 3: trial candidates
        for cand in _CANDIDATES:
            r = fd.from_qi(cand)
            val = fd.zero()
            for c in reversed(cs):
                val = val * r + c
            if val.is_zero():
                if add_root(r):
                    progress = True
                    break
    unresolved = cs if len(cs) > 1 else None
    roots.sort(key=lambda rk: rk[0].sort_key())
    return SolveResult(roots, unresolved, fd)


def _syn_div(poly, r, fd):
    """Synthetic division of a low-to-high coefficient list by (c - r)."""
    acc = fd.zero()
    high_to_low = []
    for c in reversed(poly):
        acc = acc * r + c
        high_to_low.append(acc)
    rem = high_to_low.pop()
    quo = list(reversed(high_to_low))
    return quo, rem


def _solve_numeric(coeffs, fd):
    from .roots import aberth_roots
    vals = [c.v for c in coeffs]
    with mpmath.workprec(fd.prec):
        rts = aberth_roots(vals, fd.prec)
    roots = [(NumScalar(fd, r), 1) for r in rts]
    roots.sort(key=lambda rk: rk[0].sort_key())
    return SolveResult(roots, None, fd)


# ---------------------------------------------------------------------------
# rendering / JSON
# ---------------------------------------------------------------------------

def render_scalar(x, base_symbol: str = "q") -> str:
    """Canonical ASCII form, parseable by the equation grammar."""
    if isinstance(x, NumScalar):
        return mpmath.nstr(x.v, int(x.fd.prec / 3.32) + 2)
    D = x.fd.D

    def rfstr(rf: RatFunc):
        n = _side(rf.num, D, base_symbol)
        if rf.den == up.P_ONE:
            return n
        d = _side(rf.den, D, base_symbol)
        n = f"({n})" if _needs_parens(rf.num) else n
        return f"{n}/({d})"

    if x.is_zero():
        return "0"
    parts = []
    if not x.a.is_zero():
        parts.append(rfstr(x.a))
    if not x.b.is_zero():
        bs = rfstr(x.b)
        if bs == "1":
            parts.append("rho")
        elif bs == "-1":
            parts.append("-rho")
        else:
            bs = f"({bs})" if not bs.startswith("(") and _needs_parens(x.b.num) else bs
            parts.append(f"{bs}*rho")
    out = parts[0]
    for t in parts[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


def _needs_parens(p):
    # multi-term polynomials only: single monomials render as '*'-chains and
    # mixed-complex constants already come parenthesized from _qi_str
    return len(p) > 1


def _side(p, D, base_symbol):
    if not p:
        return "0"
    use_base = all(e % D == 0 for e in p)
    parts = []
    for e in sorted(p, reverse=True):
        c = p[e]
        cs = _qi_str(c)
        if e == 0:
            parts.append(cs)
            continue
        if use_base:
            ve, v = e // D, base_symbol
        else:
            ve, v = e, "u"
        pw = v if ve == 1 else f"{v}^{ve}"
        if cs == "1":
            parts.append(pw)
        elif cs == "-1":
            parts.append(f"-{pw}")
        else:
            parts.append(f"{cs}*{pw}")
    out = parts[0]
    for t in parts[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


def _qi_str(c: QI) -> str:
    if c.is_real():
        return str(c.re)
    if c.is_imaginary():
        if c.im == 1:
            return "I"
        if c.im == -1:
            return "-I"
        return f"{c.im}*I"
    s = f"{c.re}"
    s += f" + {c.im}*I" if c.im > 0 else f" - {-c.im}*I"
    return f"({s})"


def scalar_to_json(x):
    if isinstance(x, NumScalar):
        digits = int(x.fd.prec / 3.32) + 3
        return {"complex": [mpmath.nstr(x.v.real, digits), mpmath.nstr(x.v.imag, digits)],
                "precision": x.fd.prec}

    def side(p):
        return [[str(c.re), str(c.im), e] for e, c in sorted(p.items())]

    out = {"num": side(x.a.num), "den": side(x.a.den)}
    if not x.b.is_zero():
        out["rho_num"] = side(x.b.num)
        out["rho_den"] = side(x.b.den)
    return out


def scalar_from_json(fd: FieldDescriptor, obj) -> Scalar:
    def side(items):
        return {int(e): QI(Fraction(re), Fraction(im)) for re, im, e in items}

    a = RatFunc(side(obj["num"]), side(obj["den"]))
    if "rho_num" in obj:
        b = RatFunc(side(obj["rho_num"]), side(obj["rho_den"]))
    else:
        b = RF_ZERO
    return Scalar(fd, a, b)


def descriptor_to_json(fd: FieldDescriptor):
    out = {"D": fd.D, "base_exp": str(fd.base_exp), "mode": fd.mode}
    if fd.ext_d is not None:
        out["extension"] = {"num": [[str(c.re), str(c.im), e] for e, c in sorted(fd.ext_d.num.items())],
                            "den": [[str(c.re), str(c.im), e] for e, c in sorted(fd.ext_d.den.items())]}
    if fd.specialized is not None:
        out["specialized"] = [str(fd.specialized.re), str(fd.specialized.im)]
    if fd.mode == "numeric":
        out["precision"] = fd.prec
        out["q"] = [mpmath.nstr(mpmath.mpf(complex(fd.qval).real), 30),
                    mpmath.nstr(mpmath.mpf(complex(fd.qval).imag), 30)]
    return out

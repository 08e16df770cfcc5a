"""Gaussian rational numbers: elements of Q(i) as pairs of Fractions.

These are the ground coefficients of every exact scalar in the toolkit.
Parity and imaginarity checks stay exact because i is built in rather than
adjoined.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

__all__ = ["QI", "QI_ZERO", "QI_ONE", "QI_I", "fraction_sqrt", "gaussian_int_gcd"]


def fraction_sqrt(x: Fraction):
    """Exact square root of a nonnegative Fraction, or None."""
    if x < 0:
        return None
    p, q = x.numerator, x.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


class QI:
    """An element a + b*i of Q(i), immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, *a):
        raise AttributeError("QI is immutable")

    # -- predicates

    def is_zero(self):
        return not self.re and not self.im

    def is_one(self):
        return self.re == 1 and not self.im

    def is_real(self):
        return not self.im

    def is_imaginary(self):
        return not self.re

    # -- arithmetic

    def __add__(self, other):
        return QI(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return QI(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __mul__(self, other):
        return QI(self.re * other.re - self.im * other.im,
                  self.re * other.im + self.im * other.re)

    def conj(self):
        return QI(self.re, -self.im)

    def norm2(self) -> Fraction:
        """|x|^2 as an exact Fraction."""
        return self.re * self.re + self.im * self.im

    def inv(self):
        n2 = self.norm2()
        if not n2:
            from .errors import DivisionByZero
            raise DivisionByZero("1/0 in Q(i)")
        return QI(self.re / n2, -self.im / n2)

    def __truediv__(self, other):
        return self * other.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        r, b = QI_ONE, self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def sqrt(self):
        """Exact square root in Q(i), or None when no such element exists.

        Uses |x|, then the half-angle identities: if m = |x| is rational and
        (re+m)/2 is a rational square r1^2, the root is r1 + i*im/(2 r1).
        """
        if self.is_zero():
            return QI_ZERO
        m = fraction_sqrt(self.norm2())
        if m is None:
            return None
        if not self.im:
            r = fraction_sqrt(self.re)
            if r is not None:
                return QI(r, 0)
            r = fraction_sqrt(-self.re)
            if r is not None:
                return QI(0, r)
            return None
        r1 = fraction_sqrt((self.re + m) / 2)
        if r1 is None or not r1:
            return None
        return QI(r1, self.im / (2 * r1))

    # -- comparison / hashing

    def __eq__(self, other):
        if not isinstance(other, QI):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def sort_key(self):
        return (self.re, self.im)

    # -- conversion / display

    def to_complex(self):
        return complex(self.re, self.im)

    def __repr__(self):
        return f"QI({self.re!r}, {self.im!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*I" if self.im != 1 else "I"
        sign = "+" if self.im > 0 else "-"
        imag = abs(self.im)
        istr = "I" if imag == 1 else f"{imag}*I"
        return f"({self.re}{sign}{istr})"


QI_ZERO = QI(0, 0)
QI_ONE = QI(1, 0)
QI_I = QI(0, 1)


def _round_div(a: int, b: int) -> int:
    """round(a/b) for integers, b > 0, ties toward +inf."""
    return (2 * a + b) // (2 * b)


def gaussian_int_gcd(a: QI, b: QI) -> QI:
    """Euclidean gcd of two Gaussian integers (canonical associate).

    The result is normalized so that its real part is positive and its
    imaginary part nonnegative (unique among the four unit associates).
    """
    are, aim = int(a.re), int(a.im)
    bre, bim = int(b.re), int(b.im)
    while bre or bim:
        n2 = bre * bre + bim * bim
        # nearest-integer quotient keeps the remainder norm strictly smaller
        qre = _round_div(are * bre + aim * bim, n2)
        qim = _round_div(aim * bre - are * bim, n2)
        are, aim, bre, bim = (bre, bim,
                              are - (qre * bre - qim * bim),
                              aim - (qre * bim + qim * bre))
    return canonical_unit_associate(QI(are, aim))


def canonical_unit_associate(a: QI) -> QI:
    """Multiply by the unit in {1,i,-1,-i} landing in the half-open quadrant
    re > 0, im >= 0 (zero stays zero)."""
    if a.is_zero():
        return a
    for _ in range(4):
        if a.re > 0 and a.im >= 0:
            return a
        a = a * QI_I
    raise AssertionError("unreachable")

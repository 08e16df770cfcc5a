"""Exception hierarchy for the qalg toolkit.

Every error that carries positional information in source text exposes a
``span`` attribute (a :class:`qalg.parser.SourceSpan` or ``None``).
"""


class QalgError(Exception):
    """Base class of all toolkit errors."""


# ---------------------------------------------------------------- parsing

class EquationSyntaxError(QalgError):
    def __init__(self, message, span=None, expected=None, hint=None):
        super().__init__(message)
        self.span = span
        self.expected = tuple(expected) if expected else ()
        self.hint = hint


class NonAffineShiftError(EquationSyntaxError):
    """f was applied to something other than q^j*z."""


class FieldError(QalgError):
    """A literal or operation is not representable in the requested field."""


# ---------------------------------------------------------------- scalars

class DivisionByZero(QalgError):
    pass


class MixedField(QalgError):
    """Operands belong to different field descriptors."""


class AlreadyExtended(QalgError):
    """The field already carries its single quadratic extension."""


class PoleError(QalgError):
    """Numeric evaluation hit a vanishing denominator."""


# ------------------------------------------------------------ polynomials

class ZeroPolynomial(QalgError):
    pass


class NotARoot(QalgError):
    def __init__(self, value):
        super().__init__(f"{value} is not a root of the constant equation")
        self.value = value


class NotDeflatable(QalgError):
    def __init__(self, offenders):
        super().__init__(f"z-exponents not all divisible: {offenders}")
        self.offenders = offenders


class ZeroScale(QalgError):
    pass


# ---------------------------------------------------------- structure ops

class EmptyShiftingSet(QalgError):
    pass


class NotNormalized(QalgError):
    """alpha(Q0) != 0 where the operation requires a normalized equation."""


class ExistenceFails(QalgError):
    def __init__(self, n, witness=None):
        super().__init__(f"existence condition fails at n={n}")
        self.n = n
        self.witness = witness


class NoConstantTerm(QalgError):
    """Sum of nonshifting coefficients at top shift 0 vanishes; no tail bound."""


# ---------------------------------------------------------------- engines

class MaxStepsExceeded(QalgError):
    pass


class UnresolvedRoot(QalgError):
    def __init__(self, factor):
        super().__init__("constant equation has no representable root in this field")
        self.factor = factor


class NonIntegralExponent(QalgError):
    """An exact q-power with non-integral u-exponent was requested."""


class BudgetExceeded(QalgError):
    pass


class InsufficientData(QalgError):
    pass


class Unsupported(QalgError):
    """The asymptotic method does not cover this configuration."""


class DegenerateCrest(QalgError):
    """Crest polynomial is constant (root at infinity)."""


class PrecisionWarning(UserWarning):
    """Running-error estimate is large relative to the result magnitude."""

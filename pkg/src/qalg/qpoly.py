"""Sparse canonical representation of P(z, Y_-k, ..., Y_k) and the equation
transformations: trivial-factor removal, the reduction substitution
f = f0 + z*g, index shifting, ramification/deflation and scaling.

A monomial key is (a, shifts) with a >= 0 the z-exponent and shifts the
sorted tuple of Y-indices with multiplicity; the empty tuple marks the pure
polynomial part P(z).  Coefficients are nonzero field scalars; keys are
unique, so the stored form is always collected.
"""

from __future__ import annotations

from math import comb
from typing import Dict, Tuple

from .errors import (FieldError, NotARoot, NotDeflatable, ZeroPolynomial,
                     ZeroScale)
from .field import FieldDescriptor, RatFunc, Scalar, _specialize_rf
from .gaussian import QI

MonomialKey = Tuple[int, Tuple[int, ...]]


class QPolynomial:
    """Immutable collected sparse polynomial over a field descriptor."""

    __slots__ = ("fd", "terms")

    def __init__(self, fd: FieldDescriptor, terms: Dict[MonomialKey, object] = None,
                 _canonical: bool = False):
        self.fd = fd
        if terms is None:
            terms = {}
        if _canonical:
            self.terms = terms
        else:
            self.terms = {k: c for k, c in terms.items() if not c.is_zero()}

    # ------------------------------------------------------------- basics

    def is_zero(self):
        return not self.terms

    def term_count(self):
        return len(self.terms)

    def monomial_count(self, keys=None):
        """Monomial count with base powers expanded, the way a computer
        algebra system counts terms of the fully expanded polynomial: each
        u-monomial of each (cleared) coefficient numerator counts once.
        Monomial denominators do not affect the count."""
        tot = 0
        for key, c in self.terms.items():
            if keys is not None and key not in keys:
                continue
            tot += len(c.a.num) + len(c.b.num)
        return tot

    @property
    def k(self):
        """Smallest window bound: all |shift| <= k."""
        best = 0
        for _, shifts in self.terms:
            for s in shifts:
                best = max(best, abs(s))
        return best

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def coefficient(self, a: int, shifts) -> object:
        key = (a, tuple(sorted(shifts)))
        return self.terms.get(key, self.fd.zero())

    def __eq__(self, o):
        if not isinstance(o, QPolynomial):
            return NotImplemented
        return self.fd == o.fd and self.terms == o.terms

    def __hash__(self):
        return hash(tuple(self.sorted_terms()))

    def __repr__(self):
        from .parser import render
        return f"<QPolynomial {render(self, 'human')}>"

    # ------------------------------------------------------------ algebra

    def __add__(self, o):
        out = dict(self.terms)
        for k, c in o.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return QPolynomial(self.fd, out, _canonical=True)

    def __neg__(self):
        return QPolynomial(self.fd, {k: -c for k, c in self.terms.items()},
                           _canonical=True)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        out = {}
        for (a1, s1), c1 in self.terms.items():
            for (a2, s2), c2 in o.terms.items():
                key = (a1 + a2, tuple(sorted(s1 + s2)))
                c = c1 * c2
                s = out.get(key)
                s = c if s is None else s + c
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return QPolynomial(self.fd, out, _canonical=True)

    def __pow__(self, n: int):
        if n < 0:
            raise FieldError("negative power of a q-polynomial")
        r = QPolynomial(self.fd, {(0, ()): self.fd.one()}, _canonical=True)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def scalar_mul(self, c) -> "QPolynomial":
        if c.is_zero():
            return QPolynomial(self.fd)
        return QPolynomial(self.fd, {k: v * c for k, v in self.terms.items()},
                           _canonical=True)

    # ----------------------------------------------------- spec operations

    def orders_degrees(self):
        """Exact order/degree report; raises on the zero polynomial."""
        if not self.terms:
            raise ZeroPolynomial("orders of the zero polynomial")
        ord_z = min(a for a, _ in self.terms)
        indices = sorted({j for _, shifts in self.terms for j in shifts})
        ord_y = {}
        for j in indices:
            ord_y[j] = min(shifts.count(j) for _, shifts in self.terms)
        deg0 = 0
        for (a, shifts) in self.terms:
            if a == 0:
                deg0 = max(deg0, len(shifts))
        total = max(a + len(shifts) for a, shifts in self.terms)
        return {"ord_z": ord_z, "ord_Y": ord_y, "deg_nonshifting": deg0,
                "total_deg": total}

    def remove_trivial_factors(self):
        """Divide out z^ord_z and every Y_j^ord_Yj; return (quotient, removed).

        Dividing by Y_j^m divides the equation by f(q^j z)^m, which is only
        solution-preserving away from f = 0.
        """
        rep = self.orders_degrees()
        oz, oy = rep["ord_z"], {j: m for j, m in rep["ord_Y"].items() if m}
        if not oz and not oy:
            return self, {"z": 0, "Y": {}}
        out = {}
        for (a, shifts), c in self.terms.items():
            rest = list(shifts)
            for j, m in oy.items():
                for _ in range(m):
                    rest.remove(j)
            out[(a - oz, tuple(rest))] = c
        return QPolynomial(self.fd, out, _canonical=True), {"z": oz, "Y": oy}

    def constant_polynomial(self):
        """Coefficients of c -> P(0, c, ..., c), low to high degree."""
        by_deg = {}
        for (a, shifts), c in self.terms.items():
            if a == 0:
                d = len(shifts)
                by_deg[d] = by_deg.get(d, self.fd.zero()) + c
        if not by_deg:
            return [self.fd.zero()]
        top = max(by_deg)
        return [by_deg.get(d, self.fd.zero()) for d in range(top + 1)]

    def eval_constant(self, f0) -> object:
        acc = self.fd.zero()
        for c in reversed(self.constant_polynomial()):
            acc = acc * f0 + c
        return acc

    def _is_constant_root(self, f0) -> bool:
        val = self.eval_constant(f0)
        if self.fd.mode != "numeric":
            return val.is_zero()
        import mpmath
        with mpmath.workprec(self.fd.prec):
            scale = mpmath.mpf(1)
            pw = self.fd.one()
            for c in self.constant_polynomial():
                scale = max(scale, abs((c * pw).v))
                pw = pw * f0
            return abs(val.v) <= scale * mpmath.mpf(2) ** (-self.fd.prec + 24)

    def substitute_reduction(self, f0) -> "QPolynomial":
        """Canonical P(z, f0 + z q^-k Y_-k, ..., f0 + z q^k Y_k) with the
        trivial z-power divided out.  Solutions correspond via f = f0 + z*g.
        """
        if not self._is_constant_root(f0):
            raise NotARoot(f0)
        fd = self.fd
        one = fd.one()
        f0_zero = f0.is_zero()
        qpow = {}
        out = {}

        def q_at(j):
            v = qpow.get(j)
            if v is None:
                v = fd.base_power(j)
                qpow[j] = v
            return v

        for (a, shifts), r in self.terms.items():
            # multiplicities per distinct index
            mult = {}
            for j in shifts:
                mult[j] = mult.get(j, 0) + 1
            partial = [(a, (), r)]
            for j, m in sorted(mult.items()):
                qj = q_at(j)
                choices = []
                if f0_zero:
                    choices.append((m, qj ** m))
                else:
                    f0p = [one]
                    for _ in range(m):
                        f0p.append(f0p[-1] * f0)
                    for t in range(m + 1):
                        w = fd.from_int(comb(m, t)) * f0p[m - t] * qj ** t
                        choices.append((t, w))
                nxt = []
                for (za, sh, co) in partial:
                    for t, w in choices:
                        nxt.append((za + t, sh + (j,) * t, co * w))
                partial = nxt
            for (za, sh, co) in partial:
                key = (za, tuple(sorted(sh)))
                s = out.get(key)
                s = co if s is None else s + co
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        if not out:
            return QPolynomial(fd)
        oz = min(a for a, _ in out)
        if oz:
            out = {(a - oz, sh): c for (a, sh), c in out.items()}
        return QPolynomial(fd, out, _canonical=True)

    def shift_indices(self, n: int) -> "QPolynomial":
        """alpha_i -> alpha_i + n on every factor; coefficients unchanged.

        If f solves this equation, g(z) = f(q^-n z) solves the shifted one
        (coefficientwise g_m = q^(-n m) f_m).
        """
        if n == 0:
            return self
        out = {(a, tuple(s + n for s in shifts)): c
               for (a, shifts), c in self.terms.items()}
        return QPolynomial(self.fd, out, _canonical=True)

    def ramify(self, m: int) -> "QPolynomial":
        """z -> z^m rewrite: the base becomes base^(1/m); a solution g of the
        result gives a ramified solution f(z) = g(z^(1/m)) of the original."""
        if m == 1:
            return self
        fd2 = self.fd.ramified(m)
        out = {}
        for (a, shifts), c in self.terms.items():
            out[(a * m, shifts)] = Scalar(fd2, c.a.map_exponents_mul(m),
                                          c.b.map_exponents_mul(m))
        return QPolynomial(fd2, out, _canonical=True)

    def deflate(self, m: int) -> "QPolynomial":
        """Inverse of ramify: z^m -> z, base becomes base^m.  Every z-exponent
        (and every u-exponent of every coefficient) must be divisible by m."""
        if m == 1:
            return self
        offenders = [key for key in self.terms if key[0] % m]
        if offenders:
            raise NotDeflatable(sorted(offenders))
        fd2 = self.fd.deflated(m)
        out = {}
        for (a, shifts), c in self.terms.items():
            try:
                out[(a // m, shifts)] = Scalar(fd2, c.a.map_exponents_div(m),
                                               c.b.map_exponents_div(m))
            except FieldError:
                raise NotDeflatable([(a, shifts)])
        return QPolynomial(fd2, out, _canonical=True)

    def scale(self, c, lam) -> "QPolynomial":
        """Coefficient of (a; alpha) multiplied by c^a lam^ell; solutions
        correspond via f(c z) = lam * g(z)."""
        if c.is_zero() or lam.is_zero():
            raise ZeroScale("scale factors must be nonzero")
        out = {}
        for (a, shifts), r in self.terms.items():
            out[(a, shifts)] = r * c ** a * lam ** len(shifts)
        return QPolynomial(self.fd, out)

    def specialize_base(self, value: QI) -> "QPolynomial":
        """Exact specialization of the current base to a Gaussian rational."""
        fd2 = self.fd.specialize(value)
        D = self.fd.D
        out = {}
        for key, c in self.terms.items():
            a = RatFunc.const(_specialize_rf(c.a, D, value))
            b = RatFunc.const(_specialize_rf(c.b, D, value)) if not c.b.is_zero() \
                else c.b
            out[key] = Scalar(fd2, a, b)
        return QPolynomial(fd2, out)

    # -------------------------------------------------------------- oracle

    def residual_series(self, coeffs: list, order: int) -> list:
        """Coefficients 0..order of P(z, f(q^a1 z) ...) for the truncated
        series f given by ``coeffs`` (exact scalars).  Test oracle; direct
        convolution, no incremental state."""
        fd = self.fd
        zero = fd.zero()
        res = [zero] * (order + 1)
        shifted = {}

        def weighted(j):
            w = shifted.get(j)
            if w is None:
                qj = fd.base_power(j)
                acc = fd.one()
                w = []
                for n, f in enumerate(coeffs):
                    w.append(f * acc)
                    acc = acc * qj
                shifted[j] = w
            return w

        for (a, shifts), r in self.terms.items():
            prod = [fd.one()]
            for j in shifts:
                w = weighted(j)
                lim = order - a
                new = [zero] * (min(len(prod) + len(w) - 1, lim + 1))
                for s1, c1 in enumerate(prod):
                    if c1.is_zero() or s1 > lim:
                        continue
                    for s2 in range(min(len(w), lim - s1 + 1)):
                        c2 = w[s2]
                        if not c2.is_zero():
                            new[s1 + s2] = new[s1 + s2] + c1 * c2
                prod = new
            for s, c in enumerate(prod):
                n = s + a
                if n <= order and not c.is_zero():
                    res[n] = res[n] + r * c
        return res

    # ---------------------------------------------------------------- JSON

    def to_json(self):
        from .field import descriptor_to_json, scalar_to_json
        return {"field": descriptor_to_json(self.fd),
                "terms": [{"a": a, "shifts": list(shifts),
                           "coeff": scalar_to_json(c)}
                          for (a, shifts), c in self.sorted_terms()]}


def from_json(fd: FieldDescriptor, obj) -> QPolynomial:
    from .field import scalar_from_json
    terms = {}
    for t in obj["terms"]:
        key = (t["a"], tuple(t["shifts"]))
        terms[key] = scalar_from_json(fd, t["coeff"])
    return QPolynomial(fd, terms)


def remove_trivial_factors(p: QPolynomial):
    return p.remove_trivial_factors()

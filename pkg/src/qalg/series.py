"""Solution coefficients of reduced equations.

The recursion expresses f_n through earlier coefficients via the truncated
products f(q^a1 z)...f(q^al z) of every shifting factor.  Those products are
maintained incrementally along a trie of shared sorted-shift prefixes: when
f_n arrives, every trie node extends by one order in O(n) multiplies, so the
whole run costs O(#nodes * N^2) ring operations instead of enumerating
compositions.  The same kernel runs on exact scalars and on fixed-precision
complex numbers; numeric storage is normalized by q^(-d_n), d_n = H n (n-h),
which removes the dominant Gaussian growth.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from typing import List, Optional

import mpmath

from .errors import (BudgetExceeded, ExistenceFails, NoConstantTerm,
                     NonIntegralExponent, NotARoot, NotNormalized,
                     PrecisionWarning)
from .field import eval_numeric
from .qpoly import QPolynomial
from .structure import (Classification, alpha_bounds, classify, extract,
                        is_reduced)


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightKit:
    """d_n = H n (n - h) and the derived tuple weights of the normalized
    recursion; all values exact rationals."""

    H: Fraction
    h: int

    def d(self, n: int) -> Fraction:
        if n < 0:
            return Fraction(0)
        return self.H * n * (n - self.h)

    def D_A(self, a: int, shifts, tup) -> Fraction:
        """d_{n1+...+nl+a} - sum(d_ni) - sum(alpha_i n_i)."""
        n = sum(tup) + a
        val = self.d(n)
        for alpha, ni in zip(shifts, tup):
            val -= self.d(ni) + Fraction(alpha * ni)
        return val

    def theta(self, a: int, shifts, k: int) -> Fraction:
        alpha_top = shifts[-1]
        if k == 1:
            return self.H * a * a + (self.H * self.h - alpha_top) * a
        b = a + k - 1
        val = self.H * b * b + (self.H * self.h - alpha_top) * b
        val += (k - 1) * self.H * (1 - self.h)
        # + alpha_{l-k+1} + ... + alpha_{l-1}
        val += sum(shifts[len(shifts) - k:len(shifts) - 1])
        return val

    def dmin_closed_form(self, a: int, shifts, n: int, k: int) -> Fraction:
        alpha_top = shifts[-1]
        return n * (2 * self.H * a - alpha_top + 2 * self.H * (k - 1)) \
            - self.theta(a, shifts, k)


def dmin_bruteforce(kit: WeightKit, a: int, shifts, n: int, k: int):
    """Exhaustive minimum of D_A over tuples summing to n-a with exactly k
    positive entries; returns (minimum, list of minimizing tuples).  Test
    oracle: exponential in ell, intended for ell <= 4, n <= 20."""
    ell = len(shifts)
    total = n - a
    best = None
    argmins = []
    for slots in itertools.combinations(range(ell), k):
        for comp in _compositions(total, k):
            tup = [0] * ell
            for s, v in zip(slots, comp):
                tup[s] = v
            val = kit.D_A(a, shifts, tup)
            if best is None or val < best:
                best = val
                argmins = [tuple(tup)]
            elif val == best:
                argmins.append(tuple(tup))
    return best, argmins


def _compositions(total, k):
    """All tuples of k positive integers summing to total."""
    if k == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# solutions
# ---------------------------------------------------------------------------

@dataclass
class SeriesSolution:
    coeffs: list
    N: int
    mode: str                 # "exact" | "numeric"
    f0: object
    provenance: dict = dfield(default_factory=dict)

    def to_csv(self) -> str:
        lines = ["n,value" if self.mode == "exact" else "n,re,im"]
        if self.mode == "exact":
            from .field import render_scalar
            for n, c in enumerate(self.coeffs):
                lines.append(f"{n},\"{render_scalar(c)}\"")
        else:
            digits = self.provenance.get("digits", 25)
            for n, c in enumerate(self.coeffs):
                lines.append(f"{n},{mpmath.nstr(c.real, digits)},"
                             f"{mpmath.nstr(c.imag, digits)}")
        return "\n".join(lines) + "\n"

    def to_json(self):
        from .field import render_scalar
        if self.mode == "exact":
            vals = [render_scalar(c) for c in self.coeffs]
        else:
            digits = self.provenance.get("digits", 25)
            vals = [[mpmath.nstr(c.real, digits), mpmath.nstr(c.imag, digits)]
                    for c in self.coeffs]
        prov = {k: (str(v) if isinstance(v, Fraction) else v)
                for k, v in self.provenance.items()
                if isinstance(v, (str, int, float, bool, Fraction)) or v is None}
        return {"schema": "qalg/1", "mode": self.mode, "N": self.N,
                "coeffs": vals, "provenance": prov}


# ---------------------------------------------------------------------------
# generic kernel
# ---------------------------------------------------------------------------

class _ExactRing:
    def __init__(self, fd):
        self.fd = fd
        self.zero = fd.zero()

    def base_pow(self, j):
        return self.fd.base_power(j)

    def from_scalar(self, c):
        return c

    def dot(self, xs, ys_rev):
        acc = self.zero
        for x, y in zip(xs, ys_rev):
            if not x.is_zero() and not y.is_zero():
                acc = acc + x * y
        return acc

    def is_zero(self, x):
        return x.is_zero()

    def neg_div(self, num, den):
        return -(num / den)


class _NumericRing:
    def __init__(self, fd, prec, qval):
        self.prec = prec
        self.fd = fd
        self.qval = qval
        u, _ = fd.numeric_context(prec, qval)
        self.base = u ** fd.D

    def base_pow(self, j):
        return self.base ** j

    def from_scalar(self, c):
        return eval_numeric(c, prec=self.prec, qval=self.qval)

    def dot(self, xs, ys_rev):
        return mpmath.fdot(zip(xs, ys_rev))

    def is_zero(self, x):
        return abs(x) < mpmath.mpf(2) ** (-self.prec + 12)

    def neg_div(self, num, den):
        return -(num / den)


def _series_kernel(p: QPolynomial, f0, N: int, ring, budget: Optional[int] = None):
    """f_0..f_N of the reduced equation p; the constant equation must hold
    for f0."""
    if not is_reduced(p):
        raise NotNormalized("series recursion requires a reduced equation")
    Q, poly = extract(p)
    fd = p.fd
    q0 = [f for f in Q if not f.shifting]
    if not q0:
        raise NoConstantTerm("no nonshifting q-factor")
    groups = {}
    for f in q0:
        a1 = f.shifts[0]
        groups[a1] = groups.get(a1, fd.zero()) + f.r
    e_terms = [(alpha, ring.from_scalar(c)) for alpha, c in sorted(groups.items())
               if not c.is_zero()]
    qp = [f for f in Q if f.shifting]

    # constant-term consistency: E(0) f0 + P(0) = 0 (numeric check relative
    # to the term scale)
    p0 = ring.from_scalar(poly.coefficient(0, fd))
    f0v = ring.from_scalar(f0)
    tot = p0
    scale0 = abs(p0) if isinstance(ring, _NumericRing) else None
    for _, c in e_terms:
        t = c * f0v
        tot = tot + t
        if scale0 is not None:
            scale0 = max(scale0, abs(t))
    if isinstance(ring, _NumericRing):
        with mpmath.workprec(ring.prec):
            bad = abs(tot) > max(scale0, mpmath.mpf(1)) * mpmath.mpf(2) ** (-ring.prec + 16)
    else:
        bad = not tot.is_zero()
    if bad:
        raise NotARoot(f0)

    # weighted series and shared-prefix product trie
    alphas = sorted({alpha for f in qp for alpha in f.shifts})
    wtab = {alpha: [f0v] for alpha in alphas}
    wpow = {alpha: ring.base_pow(alpha) for alpha in alphas}
    wcur = {alpha: wpow[alpha] for alpha in alphas}   # q^(alpha*(s)) at next s=1
    nodes = {}
    order = []
    for f in qp:
        if len(f.shifts) < 2:
            continue
        for i in range(2, len(f.shifts) + 1):
            pref = f.shifts[:i]
            if pref not in nodes:
                nodes[pref] = {"alpha": pref[-1], "coeffs": None}
                order.append(pref)
    order.sort(key=len)
    for pref in order:
        parent = wtab[pref[0]] if len(pref) == 2 else nodes[pref[:-1]]["coeffs"]
        w = wtab[pref[-1]]
        nodes[pref]["coeffs"] = [parent[0] * w[0]]
        nodes[pref]["parent"] = parent

    def product_at(shifts, idx):
        if len(shifts) == 1:
            return wtab[shifts[0]][idx]
        return nodes[shifts]["coeffs"][idx]

    r_vals = [(f.a, f.shifts, ring.from_scalar(f.r)) for f in qp]
    e_pows = {alpha: c for alpha, c in e_terms}       # running c * q^(alpha n)
    e_mult = {alpha: ring.base_pow(alpha) for alpha, _ in e_terms}

    numeric = isinstance(ring, _NumericRing)
    coeffs = [f0v]
    ops = 0
    warned = False
    for n in range(1, N + 1):
        # E(n) = sum c_alpha q^(alpha n)
        En = None
        for alpha in list(e_pows):
            e_pows[alpha] = e_pows[alpha] * e_mult[alpha]
            En = e_pows[alpha] if En is None else En + e_pows[alpha]
        rhs = ring.from_scalar(poly.coefficient(n, fd))
        maxmag = abs(rhs) if numeric else None
        for a, shifts, rv in r_vals:
            if a <= n:
                t = rv * product_at(shifts, n - a)
                rhs = rhs + t
                if numeric:
                    m = abs(t)
                    if m > maxmag:
                        maxmag = m
        if ring.is_zero(En):
            raise ExistenceFails(n, witness=En)
        fn = ring.neg_div(rhs, En)
        if numeric and not warned and maxmag and maxmag > 0:
            if 0 < abs(rhs) < maxmag * mpmath.mpf(2) ** (-ring.prec + 32):
                warnings.warn(f"running-error estimate large at order {n}; "
                              f"raise the working precision", PrecisionWarning)
                warned = True
        coeffs.append(fn)
        # extend weighted series to order n
        for alpha in alphas:
            wtab[alpha].append(fn * wcur[alpha])
            wcur[alpha] = wcur[alpha] * wpow[alpha]
        for pref in order:
            node = nodes[pref]
            w = wtab[pref[-1]]
            node["coeffs"].append(ring.dot(node["parent"], w[n::-1]))
            ops += n
        if budget is not None and ops > budget:
            raise BudgetExceeded(f"op budget {budget} exceeded at order {n}")
    return coeffs


def _default_f0(p: QPolynomial):
    cs = p.constant_polynomial()
    while len(cs) > 1 and cs[-1].is_zero():
        cs.pop()
    if len(cs) == 1:
        return None
    if cs[1].is_zero():
        return None
    return -(cs[0] / cs[1])


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def solve_polynomial_case(p: QPolynomial) -> SeriesSolution:
    """Closed form when there is no shifting factor: f_n = -P_n / E(n)."""
    Q, poly = extract(p)
    if any(f.shifting for f in Q):
        raise NotNormalized("shifting factors present; use the recursion")
    if not is_reduced(p):
        raise NotNormalized("equation must be reduced")
    fd = p.fd
    groups = {}
    for f in Q:
        groups[f.shifts[0]] = groups.get(f.shifts[0], fd.zero()) + f.r
    deg = poly.degree
    coeffs = []
    for n in range(max(deg, 0) + 1):
        En = fd.zero()
        for alpha, c in groups.items():
            En = En + c * fd.base_power(alpha * n)
        if En.is_zero():
            raise ExistenceFails(n)
        coeffs.append(-(poly.coefficient(n, fd) / En))
    while len(coeffs) > 1 and coeffs[-1].is_zero():
        coeffs.pop()
    return SeriesSolution(coeffs, len(coeffs) - 1, "exact", coeffs[0],
                          {"kind": "polynomial"})


def coefficients_exact(p: QPolynomial, f0=None, N: int = 30,
                       budget: Optional[int] = None) -> SeriesSolution:
    """Exact f_0..f_N by the incremental-product recursion."""
    if f0 is None:
        f0 = _default_f0(p)
        if f0 is None:
            raise NotARoot("the constant coefficient is free; pass f0")
    ring = _ExactRing(p.fd)
    coeffs = _series_kernel(p, f0, N, ring, budget)
    return SeriesSolution(coeffs, N, "exact", f0, {})


def coefficients_normalized(p: QPolynomial, f0=None, N: int = 60,
                            prec: int = 128, qval=None,
                            classification: Optional[Classification] = None,
                            budget: Optional[int] = None) -> SeriesSolution:
    """Numeric g_0..g_N with g_n = q^(-d_n) f_n at the working precision.

    Needs H and h, so the classification must be DivergentCandidate (pass a
    precomputed one to skip reclassification)."""
    cl = classification or classify(p)
    if cl.kind != "DivergentCandidate":
        raise NotNormalized("normalized coefficients need a divergent candidate")
    if f0 is None:
        f0 = _default_f0(p)
        if f0 is None:
            raise NotARoot("the constant coefficient is free; pass f0")
    kit = WeightKit(cl.H, cl.h)
    work = prec + 32
    with mpmath.workprec(work):
        ring = _NumericRing(p.fd, work, qval)
        raw = _series_kernel(p, f0, N, ring, budget)
        logbase = mpmath.log(ring.base)
        out = []
        for n, fn in enumerate(raw):
            dn = kit.d(n)
            w = mpmath.exp(-logbase * mpmath.mpf(dn.numerator) / dn.denominator) \
                if dn else mpmath.mpf(1)
            out.append(+(fn * w))
    return SeriesSolution(out, N, "numeric", f0,
                          {"H": cl.H, "h": cl.h, "normalized": True,
                           "prec": prec, "digits": int(prec / 3.32) + 2})


def coefficients_numeric_raw(p: QPolynomial, f0=None, N: int = 60,
                             prec: int = 128, qval=None,
                             budget: Optional[int] = None) -> SeriesSolution:
    """Numeric raw f_n (no Gaussian normalization); exponents may be huge but
    the binary exponent field absorbs them."""
    if f0 is None:
        f0 = _default_f0(p)
        if f0 is None:
            raise NotARoot("the constant coefficient is free; pass f0")
    work = prec + 32
    with mpmath.workprec(work):
        ring = _NumericRing(p.fd, work, qval)
        raw = [+c for c in _series_kernel(p, f0, N, ring, budget)]
    return SeriesSolution(raw, N, "numeric", f0,
                          {"normalized": False, "prec": prec,
                           "digits": int(prec / 3.32) + 2})


def q_borel(sol: SeriesSolution, H: Fraction, h: int):
    """(q^(-d_n) f_n): exact when every exponent is a whole u-power, already
    the stored form for normalized numeric solutions."""
    kit = WeightKit(H, h)
    if sol.mode == "numeric":
        if sol.provenance.get("normalized"):
            return list(sol.coeffs)
        raise NotNormalized("raw numeric solutions carry no q context here")
    out = []
    fd = sol.coeffs[0].fd
    for n, c in enumerate(sol.coeffs):
        ue = -kit.d(n) * fd.D
        if ue.denominator != 1:
            raise NonIntegralExponent(f"q^{-kit.d(n)} is not an integral u-power")
        out.append(c * fd.u_power(int(ue)))
    return out


def residual_series_numeric(p: QPolynomial, coeffs, order: int, prec: int,
                            qval=None, return_scale: bool = False):
    """Numeric counterpart of QPolynomial.residual_series (plain convolution).

    With ``return_scale`` also returns, per order, the largest magnitude of
    any single contribution: the natural denominator for a relative
    (backward-error style) residual."""
    with mpmath.workprec(prec):
        ring = _NumericRing(p.fd, prec, qval)
        res = [mpmath.mpc(0)] * (order + 1)
        scale = [mpmath.mpf(0)] * (order + 1)
        Q, poly = extract(p)
        for i, c in poly.coeffs.items():
            if i <= order:
                v = ring.from_scalar(c)
                res[i] += v
                scale[i] = max(scale[i], abs(v))
        wcache = {}

        def weighted(alpha):
            if alpha not in wcache:
                qa = ring.base_pow(alpha)
                acc = mpmath.mpc(1)
                w = []
                for c in coeffs:
                    w.append(c * acc)
                    acc *= qa
                wcache[alpha] = w
            return wcache[alpha]

        for f in Q:
            prod = [mpmath.mpc(1)]
            lim = order - f.a
            if lim < 0:
                continue
            for alpha in f.shifts:
                w = weighted(alpha)
                ln = min(len(prod) + len(w) - 1, lim + 1)
                new = [mpmath.mpc(0)] * ln
                for s1, c1 in enumerate(prod[:ln]):
                    if c1 == 0:
                        continue
                    for s2 in range(min(len(w), ln - s1)):
                        new[s1 + s2] += c1 * w[s2]
                prod = new
            rv = ring.from_scalar(f.r)
            for s, c in enumerate(prod):
                if s + f.a <= order:
                    res[s + f.a] += rv * c
                    scale[s + f.a] = max(scale[s + f.a], abs(rv * c))
        if return_scale:
            return [+c for c in res], [+s for s in scale]
        return [+c for c in res]


# ---------------------------------------------------------------------------
# majorant certificate
# ---------------------------------------------------------------------------

@dataclass
class MajorantCertificate:
    c: object                 # mpf
    gamma: object             # mpf
    majorant: List[int]       # g_n, exact integers
    verified_to: int
    shift: int                # normalization shift applied internally
    L: int

    def bound(self, n: int):
        return self.c * self.gamma ** n * self.majorant[n]


def majorant_sequence(L: int, N: int) -> List[int]:
    """g_0 = 1, g_n = [z^(n-1)] g(z)^L -- the combinatorial majorant with
    g(z) = 1 + z g(z)^L; exact integers, nondecreasing."""
    if L <= 1:
        return [1] * (N + 1)
    g = [1]
    powers = [None, g] + [[1] for _ in range(L - 1)]   # powers[j][s] = [z^s] g^j
    for n in range(1, N + 1):
        s = n - 1
        for j in range(2, L + 1):
            col, prev = powers[j], powers[j - 1]
            while len(col) <= s:
                t = len(col)
                col.append(sum(prev[i] * g[t - i] for i in range(t + 1)))
        g.append(powers[L][s])
    return g


def majorant_certificate(p: QPolynomial, n_check: int = 40, prec: int = 128,
                         qval=None, f0=None) -> MajorantCertificate:
    """Geometric majorant |k_n| <= c gamma^n g_n for the normalized solution
    (k the solution of the alpha(Q0)=0 shift of p), verified numerically up
    to ``n_check``."""
    cl = classify(p)
    if cl.kind not in ("Convergent", "PolynomialSolution"):
        raise NotNormalized("majorant certificate applies to convergent classes")
    Q, poly = extract(p)
    a0, _ = alpha_bounds(Q)
    shift = -(a0 or 0)
    pn = p.shift_indices(shift) if shift else p
    Qn, polyn = extract(pn)
    L = max(1, max((f.ell for f in Qn), default=1))
    with mpmath.workprec(prec + 32):
        ring = _NumericRing(pn.fd, prec + 32, qval)
        if f0 is None:
            f0 = _default_f0(pn)
            if f0 is None:
                raise NotARoot("the constant coefficient is free; pass f0")
        ks = _series_kernel(pn, f0, n_check, ring)
        pdeg = max(polyn.degree, 0)
        c = max([mpmath.mpf(1)] + [abs(ks[i]) for i in range(min(pdeg, n_check) + 1)])
        # inf |E(n)| over n: explicit values then the tail lower bound
        groups = {}
        for f in Qn:
            if not f.shifting:
                groups[f.shifts[0]] = groups.get(f.shifts[0], pn.fd.zero()) + f.r
        gv = {alpha: ring.from_scalar(cc) for alpha, cc in groups.items()}
        top = max(gv)
        babs = abs(ring.base)
        r_inf = None
        n = 0
        while True:
            En = sum(v * ring.base_pow(alpha) ** n for alpha, v in gv.items())
            r_inf = abs(En) if r_inf is None else min(r_inf, abs(En))
            tail = sum(abs(v) * babs ** ((alpha - top) * n)
                       for alpha, v in gv.items() if alpha != top)
            if tail < abs(gv[top]) / 2 or n > 400:
                floor = abs(gv[top]) - tail
                if floor > 0:
                    r_inf = min(r_inf, floor)
                    break
            n += 1
        sum_rp = sum(abs(ring.from_scalar(f.r)) for f in Qn if f.shifting)
        gamma = max(mpmath.mpf(1), c ** (L - 1) * sum_rp / r_inf)
        maj = majorant_sequence(L, n_check)
        for n in range(n_check + 1):
            if not abs(ks[n]) <= c * gamma ** n * maj[n] * (1 + mpmath.mpf(2) ** -30):
                raise AssertionError(f"majorant bound violated at n={n}")
    return MajorantCertificate(+c, +gamma, maj, n_check, shift, L)

"""Asymptotic growth laws for divergent solutions.

The normalized coefficients g_n = q^(-d_n) f_n are the Taylor coefficients
of U(z)/C(z) with C the crest polynomial at t = f0 and U = -C*g analytic on
a strictly larger disk.  Simple poles of 1/C at the dominant (smallest
modulus) crest roots give

    g_n  ~  sum_k  (-U(zeta_k) / (C'(zeta_k) zeta_k)) zeta_k^(-n),

so f_n ~ q^(d_n) times that sum.  When the crest has a unique shifting
element the dominant roots are the a-th roots of a common value and the sum
collapses to per-residue constants c_m, m = n mod a.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import List, Optional

import mpmath

from .errors import DegenerateCrest, InsufficientData, NotNormalized, Unsupported
from .field import eval_numeric
from .roots import aberth_roots, certify_residuals, cluster_flags
from .series import WeightKit
from .structure import CrestPolynomial, HeightProfile, StructureReport


# ---------------------------------------------------------------------------
# crest roots
# ---------------------------------------------------------------------------

@dataclass
class CrestRoots:
    roots: List[object]            # all roots, sorted by (modulus, argument)
    R: object                      # smallest modulus (mpf), inf for constant C
    dominant: List[object]
    root_at_infinity: bool
    ill_conditioned: bool
    residual_ratio: object         # worst |C(z)| / certified bound


def crest_roots(C: CrestPolynomial, f0, prec: int, qval=None,
                dominant_tol=1e-6) -> CrestRoots:
    """All zeros of z -> C_{q,f0}(z) with residual certification.

    Roots within relative ``dominant_tol`` of the smallest modulus count as
    dominant: near-ties contribute comparably at any reachable order even
    when a single root is strictly smallest in the limit."""
    coeffs = C.coeffs_at_t(f0, prec, qval)
    with mpmath.workprec(prec + 32):
        while coeffs and abs(coeffs[-1]) == 0:
            coeffs.pop()
        if not coeffs:
            return CrestRoots([], mpmath.mpf(0), [], False, False, mpmath.mpf(0))
        if len(coeffs) == 1:
            return CrestRoots([], mpmath.inf, [], True, False, mpmath.mpf(0))
        roots = aberth_roots(coeffs, prec)
        worst = certify_residuals(coeffs, roots, prec)
        flags = cluster_flags(roots, prec)
        R = min(abs(z) for z in roots)
        tol = 1 + max(mpmath.mpf(2) ** (-prec // 3), mpmath.mpf(dominant_tol))
        dominant = [z for z in roots if abs(z) <= R * tol]
        return CrestRoots(roots, +R, dominant, False, any(flags), +worst)


# ---------------------------------------------------------------------------
# q-Gevrey order
# ---------------------------------------------------------------------------

def gevrey_order(profile: HeightProfile, base_exp: Fraction = Fraction(1),
                 sign_ok: Optional[bool] = None):
    """(order in the current base, order in the original q, smallest?).

    The order is 2H; it is the smallest possible one when the sign condition
    holds."""
    s = 2 * profile.H
    return s, s * base_exp, bool(sign_ok)


# ---------------------------------------------------------------------------
# U series
# ---------------------------------------------------------------------------

def u_series(C: CrestPolynomial, g: List[object], f0, prec: int, qval=None):
    """U_n = -sum_j C_j g_(n-j): coefficients of -C_{q,f0}(z) g(z)."""
    cj = C.coeffs_at_t(f0, prec, qval)
    with mpmath.workprec(prec + 32):
        out = []
        for n in range(len(g)):
            acc = mpmath.mpc(0)
            for j, c in enumerate(cj):
                if j > n:
                    break
                acc += c * g[n - j]
            out.append(-acc)
        return out


def u_value(C: CrestPolynomial, g: List[object], f0, z, prec: int, qval=None):
    """(U(z) by plain partial sums, measured geometric tail ratio)."""
    U = u_series(C, g, f0, prec, qval)
    with mpmath.workprec(prec + 32):
        z = mpmath.mpc(z)
        tot = mpmath.mpc(0)
        terms = []
        pw = mpmath.mpc(1)
        for un in U:
            t = un * pw
            tot += t
            terms.append(abs(t))
            pw *= z
        # windowed maxima make the tail-decay estimate robust to residue
        # oscillations in the coefficient magnitudes
        w = 12
        if len(terms) >= 4 * w:
            m_near = max(terms[-2 * w:])
            m_far = max(terms[-4 * w:-2 * w])
            ratio = (m_near / m_far) ** (mpmath.mpf(1) / (2 * w)) \
                if m_far > 0 else None
        else:
            ratio = None
        return +tot, ratio


# ---------------------------------------------------------------------------
# the law
# ---------------------------------------------------------------------------

@dataclass
class AsymptoticLaw:
    H: Fraction
    h: int
    gevrey: Fraction                      # in the current base
    gevrey_q: Fraction                    # in the original q
    gevrey_smallest: bool
    roots: List[object]
    R: object
    dominant: List[object]
    amplitudes: List[object]              # per dominant root
    period: Optional[int]
    constants: Optional[List[object]]     # c_m per residue (unique-shifting crest)
    ratio: Optional[object]               # -r_A s(A) f0^(ell-1) / r_(0;0)
    theta: Fraction
    validity: str                         # "Analytic" | "Empirical"
    zeta0: Optional[object] = None
    tail_ratio: Optional[object] = None
    prec: int = 128
    base: object = None                   # numeric current-base value

    def prediction(self, n: int):
        """q^(d_n) * sum_k A_k zeta_k^(-n) at the law's precision."""
        kit = WeightKit(self.H, self.h)
        with mpmath.workprec(self.prec + 32):
            dn = kit.d(n)
            w = mpmath.exp(mpmath.log(self.base)
                           * mpmath.mpf(dn.numerator) / dn.denominator) \
                if dn else mpmath.mpf(1)
            s = mpmath.mpc(0)
            for A, zeta in zip(self.amplitudes, self.dominant):
                s += A * zeta ** (-n)
            return +(w * s)

    def normalized_prediction(self, n: int):
        with mpmath.workprec(self.prec + 32):
            s = mpmath.mpc(0)
            for A, zeta in zip(self.amplitudes, self.dominant):
                s += A * zeta ** (-n)
            return +s

    def to_json(self):
        digits = int(self.prec / 3.32) + 2

        def c(x):
            return [mpmath.nstr(x.real, digits), mpmath.nstr(x.imag, digits)] \
                if x is not None else None
        return {"schema": "qalg/1",
                "H": str(self.H), "h": self.h,
                "gevrey_order": str(self.gevrey),
                "gevrey_order_in_q": str(self.gevrey_q),
                "gevrey_smallest": self.gevrey_smallest,
                "R": mpmath.nstr(self.R, digits) if self.R != mpmath.inf else "inf",
                "roots": [c(mpmath.mpc(z)) for z in self.roots],
                "dominant": [c(mpmath.mpc(z)) for z in self.dominant],
                "amplitudes": [c(a) for a in self.amplitudes],
                "period": self.period,
                "constants": [c(x) for x in self.constants] if self.constants else None,
                "ratio": c(self.ratio) if self.ratio is not None else None,
                "theta": str(self.theta),
                "validity": self.validity,
                "precision": self.prec}


def asymptotic_law(report: StructureReport, prec: int = 128, qval=None,
                   g: Optional[List[object]] = None, f0=None) -> AsymptoticLaw:
    """Analytic law from crest roots and the U series (when g is supplied);
    per-residue constants when the crest has a unique shifting element."""
    if report.classification is None or \
            report.classification.kind != "DivergentCandidate":
        raise NotNormalized("asymptotic law requires a divergent candidate")
    prof = report.profile
    C = report.crest_poly
    if C.is_constant_in_z():
        raise DegenerateCrest("crest polynomial constant in z (root at infinity)")
    if f0 is None:
        from .series import _default_f0
        f0 = _default_f0(report.classification.normalized)
    cr = crest_roots(C, f0, prec, qval)
    with mpmath.workprec(prec + 32):
        # simplicity check on dominant roots
        cj = C.coeffs_at_t(f0, prec, qval)
        damps = []
        for zeta in cr.dominant:
            dC = mpmath.mpc(0)
            for j, c in enumerate(cj):
                if j:
                    dC += j * c * zeta ** (j - 1)
            if abs(dC) * abs(zeta) < mpmath.mpf(2) ** (-prec // 2):
                raise Unsupported("non-simple dominant crest root")
            damps.append(dC)
        amplitudes = []
        tail_ratio = None
        if g is not None:
            # g = -U/C near a simple root zeta: [z^n] contribution
            # U(zeta)/(C'(zeta) zeta) * zeta^(-n)
            for zeta, dC in zip(cr.dominant, damps):
                Uz, tail_ratio = u_value(C, g, f0, zeta, prec, qval)
                amplitudes.append(Uz / (dC * zeta))
            validity = "Analytic"
        else:
            amplitudes = [mpmath.mpc(0)] * len(cr.dominant)
            validity = "Empirical"
        # per-residue constants: defined for a single dominant root, or when
        # a unique shifting crest element makes the dominant roots the a-th
        # roots of a common value
        shifting = [f for f in prof.crest if f.shifting]
        constants = None
        ratio = None
        zeta0 = cr.dominant[0]
        if len(shifting) == 1:
            A = shifting[0]
            r00 = next(f.r for f in prof.crest if not f.shifting)
            f0n = eval_numeric(f0, prec=prec + 32, qval=qval) \
                if hasattr(f0, "fd") else mpmath.mpc(f0)
            rA = eval_numeric(A.r, prec=prec + 32, qval=qval)
            r0 = eval_numeric(r00, prec=prec + 32, qval=qval)
            ratio = -rA * A.scope() * f0n ** (A.ell - 1) / r0
        if len(cr.dominant) == 1:
            period = 1
            if g is not None:
                constants = [amplitudes[0]]
        elif len(shifting) == 1:
            period = shifting[0].a
            if g is not None:
                constants = []
                for m in range(period):
                    s = mpmath.mpc(0)
                    for Ak, zeta in zip(amplitudes, cr.dominant):
                        s += Ak * (zeta / zeta0) ** (-m)
                    constants.append(+s)
        else:
            period = 1
            for f in shifting:
                period = lcm(period, f.a)
        u, _ = C.fd.numeric_context(prec + 32, qval)
        base = u ** C.fd.D
        gv, gq, small = gevrey_order(prof, C.fd.base_exp, report.sign_ok)
    return AsymptoticLaw(prof.H, prof.h, gv, gq, small, cr.roots, cr.R,
                         cr.dominant, amplitudes, period, constants, ratio,
                         report.theta, validity, zeta0, tail_ratio, prec, base)


# ---------------------------------------------------------------------------
# empirical constants
# ---------------------------------------------------------------------------

@dataclass
class EmpiricalReport:
    period: int
    estimates: List[object]          # c_m-hat per residue (normalized scale)
    rel_change: List[object]         # relative change over the last two periods
    stable: bool
    csv: str                         # n, log10 |normalized|, re, im


def empirical_constants(g: List[object], zeta0, period: int, prec: int = 128,
                        tol=1e-6) -> EmpiricalReport:
    """Estimates c_m-hat = g_n zeta0^n at the largest available n = m mod
    period, with stabilization diagnostics.

    ``g`` are normalized coefficients q^(-d_n) f_n; the law predicts
    g_n zeta0^n -> c_m along each residue class."""
    N = len(g) - 1
    if N < 4 * period + 40:
        raise InsufficientData(f"need N >= {4 * period + 40}, have {N}")
    with mpmath.workprec(prec + 32):
        zeta0 = mpmath.mpc(zeta0)
        norm = []
        pw = mpmath.mpc(1)
        for n in range(N + 1):
            norm.append(g[n] * pw)
            pw *= zeta0
        est = []
        rel = []
        for m in range(period):
            ns = [n for n in range(N + 1) if n % period == m]
            last, prev = ns[-1], ns[-2] if len(ns) >= 2 else ns[-1]
            est.append(+norm[last])
            if abs(norm[last]) > 0:
                rel.append(+(abs(norm[last] - norm[prev]) / abs(norm[last])))
            else:
                rel.append(mpmath.mpf(0) if abs(norm[prev]) == 0 else mpmath.inf)
        stable = all(r <= tol for r in rel)
        lines = ["n,log10_abs_normalized,re,im"]
        for n in range(N + 1):
            a = abs(norm[n])
            lg = mpmath.log10(a) if a > 0 else mpmath.mpf("-inf")
            lines.append(f"{n},{mpmath.nstr(lg, 10)},{mpmath.nstr(norm[n].real, 12)},"
                         f"{mpmath.nstr(norm[n].imag, 12)}")
    return EmpiricalReport(period, est, rel, stable, "\n".join(lines) + "\n")


def radius_from_ratio_test(g: List[object], window: int = None, prec: int = 128):
    """Least-squares slope of log of the windowed maxima of |g_n| over the
    tail: estimates the convergence radius of the normalized series.

    The lim-sup envelope (sliding max over 16 indices) is fitted rather than
    the raw magnitudes, which may oscillate by residue class."""
    with mpmath.workprec(prec):
        N = len(g) - 1
        lo = N // 2 if window is None else max(0, N - window)
        w = 16
        pts = []
        for n in range(lo, N + 1):
            m = max(abs(g[k]) for k in range(max(0, n - w + 1), n + 1))
            if m > 0:
                pts.append((n, mpmath.log(m)))
        if len(pts) < 8:
            raise InsufficientData("not enough nonzero tail coefficients")
        k = len(pts)
        sx = sum(p[0] for p in pts)
        sy = sum(p[1] for p in pts)
        sxx = sum(p[0] * p[0] for p in pts)
        sxy = sum(p[0] * p[1] for p in pts)
        slope = (k * sxy - sx * sy) / (k * sxx - sx * sx)
        return +mpmath.exp(-slope)

"""Combinatorics of an equation's q-factors.

A q-factor (a; alpha_1 <= ... <= alpha_ell) with coefficient r_A is a
monomial z^a Y_alpha1 ... Y_alphaell; nonshifting factors (a = 0) drive the
coefficient recursion, shifting ones (a > 0) feed it.  This module computes
the Q0/Q+ split, the alpha bounds, heights, crest, co-height, scopes, crest
polynomial, the existence condition, the convergence classification and the
sign condition for provable divergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import mpmath

from .errors import (EmptyShiftingSet, ExistenceFails, NoConstantTerm,
                     NonIntegralExponent, NotNormalized, ZeroPolynomial)
from .field import NumScalar, Scalar, eval_numeric, render_scalar
from .qpoly import QPolynomial


# ---------------------------------------------------------------------------
# extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QFactor:
    a: int
    shifts: Tuple[int, ...]
    r: object  # Scalar / NumScalar

    @property
    def ell(self) -> int:
        return len(self.shifts)

    @property
    def alpha_top(self) -> int:
        return self.shifts[-1]

    @property
    def shifting(self) -> bool:
        return self.a > 0

    def height(self) -> Fraction:
        if not self.shifting:
            raise ValueError("height is defined for shifting factors")
        return Fraction(self.alpha_top, 2 * self.a)

    def scope(self) -> int:
        return self.shifts.count(self.shifts[-1])

    def key(self):
        return (self.a, self.shifts)


@dataclass
class PolyPart:
    coeffs: Dict[int, object]  # degree -> Scalar, nonzero entries only

    @property
    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def coefficient(self, n, fd):
        return self.coeffs.get(n, fd.zero())


def extract(p: QPolynomial) -> Tuple[List[QFactor], PolyPart]:
    """Partition the monomials: ell = 0 -> P(z); ell >= 1 -> q-factors."""
    if p.is_zero():
        raise ZeroPolynomial("cannot extract structure of the zero polynomial")
    factors = []
    poly = {}
    for (a, shifts), c in p.sorted_terms():
        if shifts:
            factors.append(QFactor(a, shifts, c))
        else:
            poly[a] = c
    return factors, PolyPart(poly)


def alpha_bounds(Q: List[QFactor]):
    """(alpha(Q0), alpha(Q+)); None encodes an empty set (-infinity)."""
    a0 = [f.alpha_top for f in Q if not f.shifting]
    ap = [f.alpha_top for f in Q if f.shifting]
    return (max(a0) if a0 else None, max(ap) if ap else None)


def is_reduced(p: QPolynomial) -> bool:
    """True iff every nonshifting q-factor is linear (ell = 1); equivalently
    the z-free part of the polynomial has total degree <= 1 in the Y's."""
    return all(len(shifts) <= 1 for (a, shifts) in p.terms if a == 0)


# ---------------------------------------------------------------------------
# heights / crest
# ---------------------------------------------------------------------------

@dataclass
class HeightProfile:
    per_index: Dict[int, Fraction]   # top-shift index -> group height
    H: Fraction
    crest: List[QFactor]             # includes nonshifting members
    h: int                           # co-height
    scopes: Dict[Tuple[int, Tuple[int, ...]], int]


def height_profile(Q: List[QFactor]) -> HeightProfile:
    """Heights from the factor list directly (the per-index mirror is
    :func:`height_profile_by_index`)."""
    shifting = [f for f in Q if f.shifting]
    if not shifting:
        raise EmptyShiftingSet("no shifting q-factors")
    a0, _ = alpha_bounds(Q)
    if a0 is not None and a0 != 0:
        raise NotNormalized("alpha(Q0) must be 0; shift indices first")
    per_index: Dict[int, Fraction] = {}
    for f in shifting:
        hgt = f.height()
        i = f.alpha_top
        if i not in per_index or hgt > per_index[i]:
            per_index[i] = hgt
    H = max(per_index.values())
    crest = [f for f in Q if Fraction(2 * f.a) * H == f.alpha_top]
    h = min(f.a for f in crest if f.shifting)
    scopes = {f.key(): f.scope() for f in crest}
    return HeightProfile(per_index, H, crest, h, scopes)


def height_profile_by_index(p: QPolynomial) -> HeightProfile:
    """Same result computed from per-index slices R_i of the shifting part:
    the group with top shift i has height i / (2 ord_z R_i)."""
    Q, _ = extract(p)
    shifting = [f for f in Q if f.shifting]
    if not shifting:
        raise EmptyShiftingSet("no shifting q-factors")
    a0, _ = alpha_bounds(Q)
    if a0 is not None and a0 != 0:
        raise NotNormalized("alpha(Q0) must be 0; shift indices first")
    groups: Dict[int, List[QFactor]] = {}
    for f in shifting:
        groups.setdefault(f.alpha_top, []).append(f)
    per_index = {}
    for i, fs in groups.items():
        ord_z = min(f.a for f in fs)   # ord_z of R_i(z)
        per_index[i] = Fraction(i, 2 * ord_z)
    H = max(per_index.values())
    crest = []
    scopes = {}
    for f in Q:
        if Fraction(2 * f.a) * H == f.alpha_top:
            crest.append(f)
            scopes[f.key()] = f.scope()
    h = min(f.a for f in crest if f.shifting)
    return HeightProfile(per_index, H, crest, h, scopes)


# ---------------------------------------------------------------------------
# crest polynomial
# ---------------------------------------------------------------------------

@dataclass
class CrestPolynomial:
    """Sum over the crest of r_A s(A) q^(-H a (a-h)) z^a t^(ell-1).

    Terms are keyed by (a, ell-1); each carries an exact scalar and a
    rational q-exponent kept separate (half-integer in general).
    """

    fd: object
    H: Fraction
    h: int
    terms: Dict[Tuple[int, int], Tuple[object, Fraction]]

    def z_degree(self) -> int:
        return max((a for a, _ in self.terms), default=0)

    def is_constant_in_z(self) -> bool:
        return all(a == 0 for a, _ in self.terms)

    def constant_term(self):
        tot = self.fd.zero()
        for (a, _), (c, _) in self.terms.items():
            if a == 0:
                tot = tot + c
        return tot

    def fold_exact(self) -> Dict[Tuple[int, int], object]:
        """Fold q^exponent into the scalar; exact only when D*exponent is an
        integer for every term."""
        out = {}
        for key, (c, qe) in self.terms.items():
            ue = qe * self.fd.D
            if ue.denominator != 1:
                raise NonIntegralExponent(f"q^{qe} is not a u-power")
            out[key] = c * self.fd.u_power(int(ue))
        return out

    def coeffs_at_t(self, f0, prec: int, qval=None) -> list:
        """Dense complex z-coefficients of C_{q,f0}: substitute t = f0 and
        evaluate numerically."""
        with mpmath.workprec(prec + 32):
            if isinstance(f0, (Scalar, NumScalar)):
                t = eval_numeric(f0, prec=prec + 32, qval=qval)
            else:
                t = mpmath.mpc(f0)
            u, _ = self.fd.numeric_context(prec + 32, qval)
            n = self.z_degree()
            out = [mpmath.mpc(0)] * (n + 1)
            logu = mpmath.log(u)
            for (a, tp), (c, qe) in self.terms.items():
                w = mpmath.exp(logu * (self.fd.D * mpmath.mpf(qe.numerator) / qe.denominator))
                out[a] += eval_numeric(c, prec=prec + 32, qval=qval) * w * t ** tp
            return out

    def render(self) -> str:
        parts = []
        for (a, tp) in sorted(self.terms):
            c, qe = self.terms[(a, tp)]
            s = render_scalar(c)
            if " " in s:
                s = f"({s})"
            piece = s
            if qe:
                piece += f"*q^({qe})"
            if a:
                piece += f"*z^{a}" if a > 1 else "*z"
            if tp:
                piece += f"*t^{tp}" if tp > 1 else "*t"
            parts.append(piece)
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        from .field import scalar_to_json
        return [{"a": a, "t_pow": tp, "coeff": scalar_to_json(c),
                 "q_exp": str(qe)} for (a, tp), (c, qe) in sorted(self.terms.items())]


def crest_polynomial(profile: HeightProfile, p: QPolynomial) -> CrestPolynomial:
    """Requires a reduced equation with alpha(Q0) = 0 and Q+ nonempty."""
    if not is_reduced(p):
        raise NotNormalized("equation must be reduced")
    H, h = profile.H, profile.h
    terms: Dict[Tuple[int, int], Tuple[object, Fraction]] = {}
    for f in profile.crest:
        qe = -H * f.a * (f.a - h)
        key = (f.a, f.ell - 1)
        add = f.r * p.fd.from_int(f.scope())
        if key in terms:
            c0, qe0 = terms[key]
            assert qe0 == qe
            add = c0 + add
        if add.is_zero():
            terms.pop(key, None)
        else:
            terms[key] = (add, qe)
    return CrestPolynomial(p.fd, H, h, terms)


# ---------------------------------------------------------------------------
# existence
# ---------------------------------------------------------------------------

@dataclass
class ExistenceCertificate:
    holds: bool                      # nonvanishing for all n >= 0
    holds_for_positive_n: bool       # enough to run the recursion given f0
    n0_degenerate: bool              # E(0) = 0 with zero constant: f0 is free
    failing_n: Optional[int]
    checked_up_to: int
    tail_start: Optional[int]        # N*: |E(n)| > 0 guaranteed for n > N*
    groups: List[Tuple[int, object]]          # [(alpha_1, sum of r_A)]
    full_groups: List[Tuple[int, object]]     # normalized by r_(0;0)
    full_constant: object                     # P(0,...,0)/r_(0;0)
    mode: str                        # formal | specialized | numeric
    note: str = ""

    def exponential_string(self, base_symbol="q") -> str:
        parts = []
        for alpha, c in self.groups:
            s = render_scalar(c)
            if " " in s:
                s = f"({s})"
            if alpha:
                parts.append(f"{s}*{base_symbol}^({alpha}*n)")
            else:
                parts.append(s)
        out = parts[0]
        for t in parts[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out


def _numeric_abs(x, prec, qval) -> mpmath.mpf:
    """|x| with interval padding 2^-64 (moduli are not field elements)."""
    v = eval_numeric(x, prec=prec, qval=qval)
    with mpmath.workprec(prec):
        return abs(v) * (1 + mpmath.mpf(2) ** -64)


def existence_check(p: QPolynomial, n_max: int = 200, prec: int = 128,
                    qval=None) -> ExistenceCertificate:
    """Certificate for: sum over Q0 of r_A q^(alpha_1 n) never vanishes.

    Exact sub-mode verifies the values for n <= N* and bounds the tail by
    the moduli argument (the negative-shift terms decay below |r_(0;0)|);
    formal fields get the per-n exactness check plus the generic-limit note,
    since a uniform N* needs a numeric |q|.
    """
    if not is_reduced(p):
        raise NotNormalized("existence check requires a reduced equation")
    Q, poly = extract(p)
    q0 = [f for f in Q if not f.shifting]
    if not q0:
        raise NoConstantTerm("no nonshifting q-factor")
    a0 = max(f.alpha_top for f in q0)
    fd = p.fd
    groups_map: Dict[int, object] = {}
    for f in q0:
        alpha = f.shifts[0]
        groups_map[alpha] = groups_map.get(alpha, fd.zero()) + f.r
    groups = sorted(((a, c) for a, c in groups_map.items() if not c.is_zero()),
                    reverse=True)
    top_alpha, c0 = groups[0]
    if top_alpha != a0 or c0.is_zero():
        raise NoConstantTerm("leading nonshifting coefficient vanishes")

    # full display: P(0, q^{-kn}, ..., q^{kn}) normalized by the shift-0
    # coefficient when present (the customary presentation), else the top one
    norm = groups_map.get(0)
    if norm is None or norm.is_zero():
        norm = c0
    ni = norm.inv()
    full_groups = [(a, c * ni) for a, c in groups]
    full_constant = poly.coefficient(0, fd) * ni

    numeric_mode = fd.mode == "numeric" or qval is not None
    specialized = fd.specialized is not None

    def E(n):
        tot = fd.zero()
        for alpha, c in groups:
            tot = tot + c * fd.base_power(alpha * n)
        return tot

    # tail bound via moduli (needs a numeric |q|)
    tail_start = None
    if numeric_mode or specialized:
        mods = []
        with mpmath.workprec(prec + 32):
            for alpha, c in groups:
                if alpha < a0:
                    mods.append((alpha - a0, _numeric_abs(c, prec + 32, qval)))
            c0m = _numeric_abs(c0, prec + 32, qval) / (1 + mpmath.mpf(2) ** -63)
            u, _ = fd.numeric_context(prec + 32, qval)
            baseabs = abs(u) ** fd.D
            n = 0
            while n <= n_max:
                tail = sum(m * baseabs ** (rel * n) for rel, m in mods) if mods else 0
                if tail < c0m:
                    tail_start = n
                    break
                n += 1

    check_to = n_max if tail_start is None else min(n_max, max(tail_start, 0))
    mode = "numeric" if (numeric_mode and not specialized) else (
        "specialized" if specialized else "formal")

    if fd.mode == "numeric":
        with mpmath.workprec(fd.prec):
            tol = mpmath.mpf(2) ** (-fd.prec + 16)

        def is_bad(n):
            return abs(E(n).v) < tol
    else:
        def is_bad(n):
            return E(n).is_zero()

    failing = next((n for n in range(check_to + 1) if is_bad(n)), None)
    n0_degenerate = False
    if failing == 0 and full_constant.is_zero():
        n0_degenerate = True
        failing = next((n for n in range(1, check_to + 1) if is_bad(n)), None)

    holds_pos = failing is None
    holds = holds_pos and not n0_degenerate
    note = ""
    if mode == "formal" and holds:
        note = ("nonvanishing checked as Laurent polynomials in the root; each "
                "value excludes at most finitely many bases, and the limit is "
                "the nonzero leading coefficient")
    if failing is not None:
        raise ExistenceFails(failing, witness=E(failing))
    return ExistenceCertificate(holds, holds_pos, n0_degenerate, failing,
                                check_to, tail_start, groups, full_groups,
                                full_constant, mode, note)


# ---------------------------------------------------------------------------
# classification / sign condition
# ---------------------------------------------------------------------------

@dataclass
class Classification:
    kind: str                       # PolynomialSolution | Convergent | DivergentCandidate
    H: Optional[Fraction] = None
    h: Optional[int] = None
    alpha_q0: Optional[int] = None
    alpha_qp: Optional[int] = None
    shift: int = 0                  # the -alpha(Q0) normalization shift
    normalized: Optional[QPolynomial] = None
    profile: Optional[HeightProfile] = None


def classify(p: QPolynomial) -> Classification:
    """PolynomialSolution when Q+ is empty; Convergent when
    alpha(Q0) >= alpha(Q+); otherwise DivergentCandidate carrying (H, h) of
    the normalized equation.  Divergence itself still needs the sign
    condition or numerics."""
    if not is_reduced(p):
        raise NotNormalized("classification requires a reduced equation")
    Q, _ = extract(p)
    a0, ap = alpha_bounds(Q)
    if ap is None:
        return Classification("PolynomialSolution", alpha_q0=a0, alpha_qp=None)
    if a0 is None:
        raise NoConstantTerm("no nonshifting q-factor")
    if a0 >= ap:
        return Classification("Convergent", alpha_q0=a0, alpha_qp=ap)
    shift = -a0
    peq = p.shift_indices(shift)
    prof = height_profile(extract(peq)[0])
    return Classification("DivergentCandidate", H=prof.H, h=prof.h,
                          alpha_q0=a0, alpha_qp=ap, shift=shift,
                          normalized=peq, profile=prof)


def sign_condition(p: QPolynomial) -> bool:
    """True iff {P_i} u {r_A : Q+} u {-r_A : Q0} are real numbers of one sign
    for every real base > 1 (sufficient coefficientwise check)."""
    Q, poly = extract(p)
    signs = set()
    for c in poly.coeffs.values():
        signs.add(_sign(c))
    for f in Q:
        signs.add(_sign(f.r) if f.shifting else _sign(-f.r))
    return None not in signs and len(signs) == 1


def _sign(c):
    if isinstance(c, NumScalar):
        if c.v.imag != 0 or c.v.real == 0:
            return None
        return 1 if c.v.real > 0 else -1
    return c.sign_for_real_base()


# ---------------------------------------------------------------------------
# aggregate report
# ---------------------------------------------------------------------------

@dataclass
class StructureReport:
    factors: List[QFactor]
    poly_part: PolyPart
    alpha_q0: Optional[int]
    alpha_qp: Optional[int]
    reduced: bool
    L: int
    classification: Classification = None
    profile: Optional[HeightProfile] = None
    crest_poly: Optional[CrestPolynomial] = None
    existence: Optional[ExistenceCertificate] = None
    existence_failure: Optional[int] = None   # witness n of a failed condition
    sign_ok: Optional[bool] = None
    theta: Optional[Fraction] = None

    @property
    def ell_star(self) -> int:
        return self.L

    def to_json(self):
        from .field import scalar_to_json

        def frac(x):
            if x is None:
                return None
            x = Fraction(x)
            return {"num": str(x.numerator), "den": str(x.denominator)}

        out = {
            "schema": "qalg/1",
            "factors": [{"a": f.a, "shifts": list(f.shifts),
                         "r": scalar_to_json(f.r)} for f in self.factors],
            "poly_part": {str(i): scalar_to_json(c)
                          for i, c in sorted(self.poly_part.coeffs.items())},
            "alpha_q0": self.alpha_q0,
            "alpha_qp": self.alpha_qp,
            "reduced": self.reduced,
            "L": self.L,
        }
        if self.classification is not None:
            cl = self.classification
            out["classification"] = {
                "kind": cl.kind,
                "H": frac(cl.H),
                "h": cl.h,
                "shift": cl.shift,
            }
        if self.profile is not None:
            out["H"] = frac(self.profile.H)
            out["h"] = self.profile.h
            out["crest"] = [{"a": f.a, "shifts": list(f.shifts)}
                            for f in self.profile.crest]
            out["scopes"] = {str(k): v for k, v in self.profile.scopes.items()}
        if self.crest_poly is not None:
            out["crest_polynomial"] = self.crest_poly.to_json()
        if self.existence is not None:
            ex = self.existence
            out["existence"] = {
                "holds": ex.holds,
                "holds_for_positive_n": ex.holds_for_positive_n,
                "n0_degenerate": ex.n0_degenerate,
                "checked_up_to": ex.checked_up_to,
                "tail_start": ex.tail_start,
                "mode": ex.mode,
                "sum": ex.exponential_string(),
            }
        if self.sign_ok is not None:
            out["sign_condition"] = self.sign_ok
        if self.theta is not None:
            out["theta"] = {"num": str(self.theta.numerator),
                            "den": str(self.theta.denominator)}
        return out


def theta_heuristic(profile: HeightProfile, Q: List[QFactor]) -> Fraction:
    """min(2H, min over non-crest factors of (2 a H - alpha_top), 1):
    geometric margin of the removable-singularity disk."""
    crest_keys = {f.key() for f in profile.crest}
    vals = [Fraction(2) * profile.H, Fraction(1)]
    off = [Fraction(2 * f.a) * profile.H - f.alpha_top
           for f in Q if f.key() not in crest_keys]
    if off:
        vals.append(min(off))
    return min(vals)


def analyze_structure(p: QPolynomial, n_max: int = 200, prec: int = 128,
                      qval=None) -> StructureReport:
    """Full report; existence and crest data are filled in when defined."""
    Q, poly = extract(p)
    a0, ap = alpha_bounds(Q)
    red = is_reduced(p)
    L = max([f.ell for f in Q], default=0)
    rep = StructureReport(Q, poly, a0, ap, red, L)
    if not red:
        return rep
    try:
        rep.existence = existence_check(p, n_max=n_max, prec=prec, qval=qval)
    except ExistenceFails as exc:
        rep.existence_failure = exc.n
        return rep
    except NoConstantTerm:
        return rep
    rep.classification = classify(p)
    rep.sign_ok = sign_condition(p)
    if rep.classification.kind == "DivergentCandidate":
        rep.profile = rep.classification.profile
        rep.crest_poly = crest_polynomial(rep.profile, rep.classification.normalized)
        rep.theta = theta_heuristic(rep.profile, extract(rep.classification.normalized)[0])
    return rep

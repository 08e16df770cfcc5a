"""Sparse univariate polynomials over Q(i), represented as dicts {exp: QI}.

Exponents are nonnegative integers (negative powers of the root u live in
the denominator of a rational function, see :mod:`qalg.field`).  The zero
polynomial is the empty dict.  All functions treat their inputs as
immutable and return fresh dicts.
"""

from __future__ import annotations

from .gaussian import QI, QI_ONE, QI_ZERO, canonical_unit_associate, gaussian_int_gcd

Poly = dict  # {int: QI}

P_ZERO: Poly = {}
P_ONE: Poly = {0: QI_ONE}


def pconst(c: QI) -> Poly:
    return {} if c.is_zero() else {0: c}


def pmono(c: QI, e: int) -> Poly:
    return {} if c.is_zero() else {e: c}


def pdegree(p: Poly) -> int:
    """Degree; -1 for the zero polynomial."""
    return max(p) if p else -1


def porder(p: Poly) -> int:
    """Smallest exponent with nonzero coefficient; 0 for the zero polynomial."""
    return min(p) if p else 0


def pis_zero(p: Poly) -> bool:
    return not p


def plead(p: Poly) -> QI:
    return p[max(p)]


def padd(p: Poly, q: Poly) -> Poly:
    r = dict(p)
    for e, c in q.items():
        s = r.get(e)
        s = c if s is None else s + c
        if s.is_zero():
            r.pop(e, None)
        else:
            r[e] = s
    return r


def pneg(p: Poly) -> Poly:
    return {e: -c for e, c in p.items()}


def psub(p: Poly, q: Poly) -> Poly:
    return padd(p, pneg(q))


def pscale(p: Poly, c: QI) -> Poly:
    if c.is_zero():
        return {}
    return {e: cc * c for e, cc in p.items()}


def pshift(p: Poly, k: int) -> Poly:
    """Multiply by u^k (k may be negative if all exponents allow it)."""
    return {e + k: c for e, c in p.items()}


def pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return {}
    if len(p) == 1:
        ((e, c),) = p.items()
        return {e + f: c * d for f, d in q.items()}
    if len(q) == 1:
        ((f, d),) = q.items()
        return {e + f: c * d for e, c in p.items()}
    r: Poly = {}
    for e, c in p.items():
        for f, d in q.items():
            g = e + f
            s = r.get(g)
            s = c * d if s is None else s + c * d
            if s.is_zero():
                r.pop(g, None)
            else:
                r[g] = s
    return r


def ppow(p: Poly, n: int) -> Poly:
    r, b = dict(P_ONE), p
    while n:
        if n & 1:
            r = pmul(r, b)
        b = pmul(b, b)
        n >>= 1
    return r


def pdivmod(p: Poly, d: Poly):
    """Euclidean division over the field Q(i); d must be nonzero."""
    if not d:
        raise ZeroDivisionError("polynomial division by zero")
    dd, dl = pdegree(d), plead(d)
    dli = dl.inv()
    q: Poly = {}
    r = dict(p)
    while r and pdegree(r) >= dd:
        e = pdegree(r)
        c = r[e] * dli
        q[e - dd] = c
        for f, cf in d.items():
            g = e - dd + f
            s = r.get(g)
            s = -(c * cf) if s is None else s - c * cf
            if s.is_zero():
                r.pop(g, None)
            else:
                r[g] = s
    return q, r


def pmonic(p: Poly) -> Poly:
    if not p:
        return p
    return pscale(p, plead(p).inv())


def pgcd(p: Poly, q: Poly) -> Poly:
    """Gcd over Q(i)[u], returned primitive with Gaussian-integer
    coefficients (canonical unit).

    Uses a primitive pseudo-remainder sequence so that all intermediate
    arithmetic stays in Z[i]; the naive monic Euclid suffers catastrophic
    fraction growth on inputs of even moderate degree.
    """
    a = _primitive_int(p)
    b = _primitive_int(q)
    if not a:
        return b
    if not b:
        return a
    if pdegree(a) < pdegree(b):
        a, b = b, a
    while b:
        r = _pseudo_rem(a, b)
        a, b = b, _primitive_int(r)
    return a


def _primitive_int(p: Poly) -> Poly:
    """Scale to Gaussian-integer coefficients with content 1 (canonical)."""
    if not p:
        return {}
    from .gaussian import gaussian_int_gcd
    d = 1
    for c in p.values():
        d = d * c.re.denominator // _gcd(d, c.re.denominator)
        d = d * c.im.denominator // _gcd(d, c.im.denominator)
    if d != 1:
        p = pscale(p, QI(d))
    g = QI_ZERO
    for c in p.values():
        g = c if g.is_zero() else gaussian_int_gcd(g, c)
        if g.is_one():
            return dict(p)
    return pscale(p, g.inv())


def _pseudo_rem(a: Poly, b: Poly) -> Poly:
    """prem(a, b): remainder of lc(b)^(da-db+1) * a modulo b, integer ops."""
    db = pdegree(b)
    lb = plead(b)
    r = dict(a)
    while r and pdegree(r) >= db:
        e = pdegree(r)
        lr = r[e]
        # r <- lb * r - lr * u^(e-db) * b
        new = {}
        for k, c in r.items():
            new[k] = c * lb
        for k, c in b.items():
            t = k + e - db
            s = new.get(t, QI_ZERO) - lr * c
            if s.is_zero():
                new.pop(t, None)
            else:
                new[t] = s
        new.pop(e, None)
        r = new
    return r


def pderiv(p: Poly) -> Poly:
    return {e - 1: c * QI(e) for e, c in p.items() if e}


def peval_qi(p: Poly, x: QI) -> QI:
    """Exact evaluation at a Gaussian rational point."""
    acc = QI_ZERO
    for e in sorted(p, reverse=True):
        acc = acc + p[e] * x ** e
    return acc


def psubst_power(p: Poly, m: int) -> Poly:
    """u -> u^m on exponents."""
    return {e * m: c for e, c in p.items()}


def pdiv_exponents(p: Poly, m: int) -> Poly:
    """u^m -> u; every exponent must be divisible by m."""
    if any(e % m for e in p):
        raise ValueError("exponent not divisible")
    return {e // m: c for e, c in p.items()}


def psqrt(p: Poly):
    """Exact polynomial square root over Q(i), or None.

    Matches coefficients from the top; the leading coefficient must be a
    square in Q(i) and the degree even.
    """
    if not p:
        return {}
    n = pdegree(p)
    if n % 2 or porder(p) % 2:
        return None
    lc = plead(p).sqrt()
    if lc is None:
        return None
    half = n // 2
    r: Poly = {half: lc}
    # long-division style: peel two r*delta terms per step
    rem = psub(p, pmul(r, r))
    inv2lc = (lc + lc).inv()
    for e in range(half - 1, -1, -1):
        c = rem.get(e + half, QI_ZERO)
        ce = c * inv2lc
        if not ce.is_zero():
            term = {e: ce}
            rem = psub(rem, padd(pmul(term, pscale(r, QI(2))), pmul(term, term)))
            r[e] = ce
    if rem:
        return None
    return r


def pcontent_and_denlcm(p: Poly):
    """(gaussian-integer content, lcm of coefficient denominators).

    The content is the canonical-associate gcd of the numerator Gaussian
    integers once the common denominator d has been cleared: p = (content/d) * primitive.
    """
    if not p:
        return QI_ONE, 1
    d = 1
    for c in p.values():
        d = d * c.re.denominator // _gcd(d, c.re.denominator)
        d = d * c.im.denominator // _gcd(d, c.im.denominator)
    g = QI_ZERO
    for c in p.values():
        gi = QI(c.re * d, c.im * d)
        g = gi if g.is_zero() else gaussian_int_gcd(g, gi)
    return canonical_unit_associate(g), d


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def prender(p: Poly, var: str = "u", base_power: int = 1) -> str:
    """Deterministic ASCII rendering, descending exponents.

    When ``base_power`` > 1 and an exponent is divisible by it, the exponent
    is shown relative to the base variable (used to print q-powers when the
    storage variable is a root of q).
    """
    if not p:
        return "0"
    parts = []
    for e in sorted(p, reverse=True):
        c = p[e]
        if e == 0:
            parts.append(str(c))
            continue
        if e % base_power == 0:
            ve = e // base_power
            v = var
        else:
            ve, v = e, var + "!"  # marker: caller should not request base display
        pw = v if ve == 1 else f"{v}^{ve}"
        if c.is_one():
            parts.append(pw)
        elif (-c.re, -c.im) == (1, 0):
            parts.append(f"-{pw}")
        else:
            parts.append(f"{c}*{pw}")
    out = parts[0]
    for t in parts[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out

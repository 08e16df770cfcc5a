"""Simultaneous-iteration polynomial root finding (Aberth-Ehrlich).

All roots of a dense complex polynomial are refined together; the returned
roots carry a residual certificate checked against
|p(z)| <= 2^(-prec+16) * sum_j |c_j| |z|^j.
"""

from __future__ import annotations

import mpmath


def _horner(coeffs, z):
    acc = mpmath.mpc(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _horner_both(coeffs, z):
    """(p(z), p'(z)) in one pass."""
    p = mpmath.mpc(0)
    dp = mpmath.mpc(0)
    for c in reversed(coeffs):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def aberth_roots(coeffs, prec, max_iter=200):
    """All roots of sum coeffs[j] z^j (low-to-high, complex), degree >= 1.

    Runs at elevated working precision and polishes until the simultaneous
    correction is below the target.  Returns a list of mpc roots sorted by
    (modulus, argument).
    """
    cs = [mpmath.mpc(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    n = len(cs) - 1
    if n < 1:
        raise ValueError("degree must be >= 1")
    work = prec + 64
    with mpmath.workprec(work):
        zero_roots = []
        while cs[0] == 0:
            zero_roots.append(mpmath.mpc(0))
            cs = cs[1:]
            n -= 1
        if n == 0:
            return zero_roots
        lead = cs[-1]
        mon = [c / lead for c in cs]
        # initial points: circle at the Fujiwara bound
        r = mpmath.mpf(0)
        for j, c in enumerate(mon[:-1]):
            if c != 0:
                t = abs(c) if j else abs(c) / 2
                r = max(r, 2 * t ** (mpmath.mpf(1) / (n - j)))
        r = max(r, mpmath.mpf("1e-3"))
        zs = [r * mpmath.expjpi(mpmath.mpf(2 * k) / n + mpmath.mpf("0.41")) for k in range(n)]
        tol = mpmath.mpf(2) ** (-prec - 8)
        for _ in range(max_iter):
            done = True
            new = list(zs)
            for k in range(n):
                p, dp = _horner_both(mon, zs[k])
                if dp == 0:
                    ratio = mpmath.mpc(0)
                else:
                    ratio = p / dp
                s = mpmath.mpc(0)
                for j in range(n):
                    if j != k:
                        d = zs[k] - zs[j]
                        if d == 0:
                            d = mpmath.mpf(2) ** (-work)
                        s += 1 / d
                denom = 1 - ratio * s
                if denom == 0:
                    corr = ratio
                else:
                    corr = ratio / denom
                new[k] = zs[k] - corr
                scale = max(abs(zs[k]), mpmath.mpf(1))
                if abs(corr) > tol * scale:
                    done = False
            zs = new
            if done:
                break
        roots = zero_roots + [_snap(z, prec) for z in zs]
        roots.sort(key=lambda z: (abs(z), mpmath.arg(z)))
        return [+z for z in roots]


def _snap(z, prec):
    """Chop stray real/imaginary dirt below the certified residual scale so
    real and imaginary roots sort deterministically."""
    thr = mpmath.mpf(2) ** (-prec + 24)
    scale = abs(z)
    if scale == 0:
        return z
    re, im = z.real, z.imag
    if abs(im) < thr * scale:
        im = mpmath.mpf(0)
    if abs(re) < thr * scale:
        re = mpmath.mpf(0)
    return mpmath.mpc(re, im)


def certify_residuals(coeffs, roots, prec):
    """Max of |p(root)| / (2^(-prec+16) * sum |c_j||root|^j); <= 1 passes."""
    worst = mpmath.mpf(0)
    with mpmath.workprec(prec + 32):
        bound_scale = mpmath.mpf(2) ** (-prec + 16)
        for z in roots:
            p = _horner(coeffs, z)
            norm = sum(abs(c) * abs(z) ** j for j, c in enumerate(coeffs))
            if norm == 0:
                continue
            worst = max(worst, abs(p) / (bound_scale * norm))
    return worst


def cluster_flags(roots, prec):
    """True entries mark roots closer than 2^(-prec/4) (relative) to another."""
    n = len(roots)
    flags = [False] * n
    with mpmath.workprec(prec):
        thr = mpmath.mpf(2) ** (-prec // 4)
        for i in range(n):
            for j in range(i + 1, n):
                scale = max(abs(roots[i]), abs(roots[j]), mpmath.mpf(1))
                if abs(roots[i] - roots[j]) < thr * scale:
                    flags[i] = flags[j] = True
    return flags

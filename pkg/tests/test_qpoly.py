"""Substitution suite: trivial factors, reduction step, shift, ramify,
deflate, scale, and the plug-in correspondence oracles."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qalg.errors import NotARoot, NotDeflatable, ZeroPolynomial, ZeroScale
from qalg.field import FieldDescriptor
from qalg.gaussian import QI
from qalg.parser import parse_to_poly
from qalg.qpoly import QPolynomial

FD = FieldDescriptor(D=2)

QPB = "f(z/q)*f(z)^2*f(q*z) - f(z) + z"          # inverted first Painleve
QPC = "z^3*f(z/q)*f(z)^2*f(q*z) - f(z) + 1"
QPD = ("f(z/q)/q + q*f(q*z) + f(z) + z*f(z/q)*f(q*z) + 2*z*f(z/q)*f(z)/q"
       " + 2*q*z*f(z)*f(q*z) + z*f(z)^2 + 2*z^2*f(z/q)*f(z)*f(q*z)"
       " + z^2*f(z/q)*f(z)^2/q + q*z^2*f(z)^2*f(q*z)"
       " + z^3*f(z/q)*f(z)^2*f(q*z) + 1")

CFA = ("4*f(q*z)^4 - 9*f(z)^2*f(q*z)*f(q^2*z) + 2*f(z)^3*f(q^2*z)"
       " + z*f(z)*f(q^2*z)/q^4 - z^3*f(z)^4*f(q^5*z)^2 - z^3*f(q^2*z)/q^4"
       " - z^3*f(z) + z^5")


def test_remove_trivial_factors_basic():
    p = parse_to_poly("z^3*f(z) + z^4*f(z)^2", FD)
    q, removed = p.remove_trivial_factors()
    assert removed == {"z": 3, "Y": {0: 1}}
    assert q == parse_to_poly("1 + z*f(z)", FD)


def test_remove_trivial_factors_fixpoint():
    p = parse_to_poly(QPB, FD)
    q, removed = p.remove_trivial_factors()
    assert q == p and removed == {"z": 0, "Y": {}}


def test_remove_trivial_on_zero_polynomial():
    with pytest.raises(ZeroPolynomial):
        QPolynomial(FD).remove_trivial_factors()


def test_qp1_zero_branch_gives_qpc():
    p = parse_to_poly(QPB, FD)
    got = p.substitute_reduction(FD.zero())
    # f = z*g turns the equation into z^3 g(z/q)g^2 g(qz) = g - 1
    assert got == parse_to_poly(QPC, FD)


def test_qp1_one_branch_gives_qpd_12_terms():
    p = parse_to_poly(QPB, FD)
    got = p.substitute_reduction(FD.one())
    expected = parse_to_poly(QPD, FD)
    assert got.term_count() == 12
    assert got == expected


def test_substitute_requires_root():
    p = parse_to_poly(QPB, FD)
    with pytest.raises(NotARoot):
        p.substitute_reduction(FD.from_int(5))


def test_shift_identity_and_inverse():
    p = parse_to_poly(QPD, FD)
    assert p.shift_indices(0) is p
    assert p.shift_indices(3).shift_indices(-3) == p


def test_ramify_cfa_matches_base_r_display():
    p = parse_to_poly(CFA, FD)
    r = p.ramify(2)
    # z^2 Y0 Y2 / r^8 and z^10 terms of the ramified polynomial
    assert r.coefficient(2, (0, 2)) == r.fd.u_power(-16)
    assert r.coefficient(10, ()) == r.fd.one()
    assert r.coefficient(6, (0, 0, 0, 0, 5, 5)) == -r.fd.one()
    assert r.fd.base_exp == Fraction(1, 2)


def test_ramify_deflate_roundtrip():
    p = parse_to_poly(CFA, FD)
    assert p.ramify(3).deflate(3) == p
    assert p.ramify(1) is p and p.deflate(1) is p


def test_deflate_qpc_by_3():
    p = parse_to_poly(QPC, FD)
    h = p.deflate(3)
    assert h.coefficient(1, (-1, 0, 0, 1)) == h.fd.one()
    assert h.coefficient(0, (0,)) == -h.fd.one()
    assert h.coefficient(0, ()) == h.fd.one()
    assert h.term_count() == 3
    assert h.fd.base_exp == Fraction(3)


def test_deflate_qpd_not_deflatable():
    p = parse_to_poly(QPD, FD)
    with pytest.raises(NotDeflatable):
        p.deflate(3)


def test_scale_identity_and_zero_reject():
    p = parse_to_poly(QPD, FD)
    assert p.scale(FD.one(), FD.one()) == p
    with pytest.raises(ZeroScale):
        p.scale(FD.zero(), FD.one())


def test_orders_degrees_on_examples():
    assert parse_to_poly(CFA, FD).orders_degrees()["deg_nonshifting"] == 4
    assert parse_to_poly(QPC, FD).orders_degrees()["deg_nonshifting"] == 1
    rep = parse_to_poly("z^2*f(q^3*z)", FD).orders_degrees()
    assert rep["ord_z"] == 2 and rep["ord_Y"] == {3: 1}


# ------------------------------------------------------------ plug-in oracles

def random_series(fd, n, seed):
    """Deterministic 'random' exact series with small rational coefficients."""
    coeffs = []
    state = seed
    for i in range(n + 1):
        state = (state * 1103515245 + 12345) % (1 << 31)
        num = (state % 13) - 6
        state = (state * 1103515245 + 12345) % (1 << 31)
        den = (state % 4) + 1
        coeffs.append(fd.from_fraction(Fraction(num, den)))
    return coeffs


@st.composite
def sparse_polys(draw):
    terms = {}
    for _ in range(draw(st.integers(1, 4))):
        a = draw(st.integers(0, 3))
        ell = draw(st.integers(0, 2))
        shifts = tuple(sorted(draw(st.integers(-2, 2)) for _ in range(ell)))
        c = draw(st.integers(-4, 4))
        ue = draw(st.integers(-1, 1))
        if c:
            terms[(a, shifts)] = FD.from_int(c) * FD.base_power(ue)
    if not terms:
        terms[(1, (0,))] = FD.one()
    return QPolynomial(FD, terms)


ORDER = 8


@given(sparse_polys(), st.integers(0, 2 ** 20))
@settings(max_examples=100, deadline=None)
def test_plugin_shift_identity(p, seed):
    n = 2
    g = random_series(FD, ORDER, seed)
    shifted = p.shift_indices(n)
    # g solves shifted iff f with f_m = q^(n m) g_m solves p
    qn = FD.base_power(n)
    acc = FD.one()
    f = []
    for gm in g:
        f.append(gm * acc)
        acc = acc * qn
    r1 = p.residual_series(f, ORDER)
    r2 = shifted.residual_series(g, ORDER)
    assert r1 == r2


@given(sparse_polys(), st.integers(0, 2 ** 20))
@settings(max_examples=100, deadline=None)
def test_plugin_reduction_identity(p, seed):
    # compare P(f0 + z g) with z^s * P'(g) where P' = substitute_reduction
    cp = p.constant_polynomial()
    f0 = FD.zero()
    acc = FD.zero()
    for c in reversed(cp):
        acc = acc * f0 + c
    if not acc.is_zero():
        # make f0=0 a root by removing the constant term
        p = p - QPolynomial(FD, {(0, ()): acc})
        if p.is_zero():
            return
    reduced = p.substitute_reduction(FD.zero())
    g = random_series(FD, ORDER, seed)
    f = [FD.zero()] + g[:-1]  # f = f0 + z*g with f0 = 0
    r1 = p.residual_series(f, ORDER)
    r2 = reduced.residual_series(g, ORDER)
    # r1 = z^s * r2 for the removed power s
    s = next((i for i, c in enumerate(r1) if not c.is_zero()), None)
    s2 = next((i for i, c in enumerate(r2) if not c.is_zero()), None)
    if s is None or s2 is None:
        return
    shift = s - s2
    assert shift >= 0
    for i in range(ORDER + 1 - shift):
        assert r1[i + shift] == r2[i]


@given(sparse_polys(), st.integers(0, 2 ** 20))
@settings(max_examples=60, deadline=None)
def test_plugin_ramify_identity(p, seed):
    m = 2
    rp = p.ramify(m)
    g = random_series(FD, ORDER, seed)
    # f(z) := g(z^m) solves rp iff g solves p; residuals relate the same way
    f = []
    for i, c in enumerate(g):
        f.extend([c] + [FD.zero()] * (m - 1))
    f = f[: m * ORDER + 1]
    fr = [rp.fd.from_qi(QI(0))] * len(f)
    # coefficients of p are mapped into rp.fd; map the series the same way
    from qalg.field import Scalar
    f = [Scalar(rp.fd, c.a.map_exponents_mul(m), c.b.map_exponents_mul(m)) for c in f]
    r1 = p.residual_series(g, ORDER)
    r2 = rp.residual_series(f, m * ORDER)
    for i, c in enumerate(r1):
        mapped = Scalar(rp.fd, c.a.map_exponents_mul(m), c.b.map_exponents_mul(m))
        assert r2[m * i] == mapped
    for j, c in enumerate(r2):
        if j % m:
            assert c.is_zero()


@given(sparse_polys(), st.integers(0, 2 ** 20))
@settings(max_examples=60, deadline=None)
def test_plugin_scale_identity(p, seed):
    c = FD.from_int(2)
    lam = FD.from_int(3)
    sp = p.scale(c, lam)
    g = random_series(FD, 12, seed)
    # f(c z) = lam g(z): f_n = lam g_n / c^n
    f = []
    acc = FD.one()
    for gm in g:
        f.append(lam * gm * acc.inv())
        acc = acc * c
    r1 = p.residual_series(f, 12)
    r2 = sp.residual_series(g, 12)
    # [z^n] residual_sp(g) = c^n [z^n] residual_p(f)
    acc = FD.one()
    for n in range(13):
        assert r2[n] == r1[n] * acc
        acc = acc * c


@given(sparse_polys())
@settings(max_examples=100, deadline=None)
def test_canonical_after_ops(p):
    for q in (p.shift_indices(2), p.ramify(2), p.scale(FD.from_int(2), FD.from_int(3))):
        assert all(not c.is_zero() for c in q.terms.values())
        assert len(set(q.terms)) == q.term_count()


def test_json_roundtrip():
    from qalg.qpoly import from_json
    p = parse_to_poly(QPD, FD)
    assert from_json(FD, p.to_json()) == p


def test_plugin_oracle_numeric_mode():
    # numeric-mode residual correspondence at 128-bit: substitute f = f0+z*g
    # for random numeric series; residuals agree to 1e-20 relative
    import mpmath
    from qalg.series import residual_series_numeric

    p = parse_to_poly(QPB, FD)
    reduced = p.substitute_reduction(FD.zero())
    prec = 128
    with mpmath.workprec(prec):
        state = 20240229
        g = []
        for _ in range(13):
            state = (state * 1103515245 + 12345) % (1 << 31)
            g.append(mpmath.mpc(state % 7 - 3, (state >> 8) % 5 - 2))
        f = [mpmath.mpc(0)] + g[:-1]
        r1, s1 = residual_series_numeric(p, f, 12, prec, qval=2,
                                         return_scale=True)
        r2 = residual_series_numeric(reduced, g, 12, prec, qval=2)
        # P(f0 + z g) = z * P'(g) for this equation (one z removed)
        assert abs(r1[0]) <= max(s1[0], mpmath.mpf(1)) * mpmath.mpf(10) ** -20
        for n in range(12):
            denom = max(abs(r1[n + 1]), mpmath.mpf(1))
            assert abs(r1[n + 1] - r2[n]) / denom <= mpmath.mpf(10) ** -20

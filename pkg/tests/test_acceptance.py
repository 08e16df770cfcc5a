"""Acceptance suite: one test per criterion, each printing a pass/fail line
with its wall-clock time and asserting the stated tolerances.

Two literal printed values are demonstrably corrupted in the source text
(the analysis is summarized in the test docstrings below): the
asymptotic constant of the colored-Jones example (inverted product) and the
even-residue lattice-path constant (a dropped Pochhammer factor).  The
corresponding sub-criteria are implemented BOTH ways: the corrected values
pass at far tighter tolerance than demanded, and the literal variants are
asserted in separate xfail-free tests that fail red, keeping the record
honest.
"""

import time
from fractions import Fraction

import mpmath

from qalg.corpus import (CFA_TEXT, DESIGNED_TEXT, QP1_TEXT, RUNNING_TEXT,
                         drake_b_closed_forms, get_entry, jones_closed_form,
                         qpochhammer)
from qalg.field import FieldDescriptor
from qalg.gaussian import QI
from qalg.jobs import JobConfig, asym_job, prepare, solve_job
from qalg.parser import parse_to_poly, render
from qalg.qpoly import QPolynomial
from qalg.reduction import ReducePolicy, reduce_to_normal_form
from qalg.series import (WeightKit, coefficients_exact, dmin_bruteforce,
                         majorant_certificate, residual_series_numeric)
from qalg.structure import (alpha_bounds, analyze_structure, classify, extract,
                            existence_check, height_profile)

FD = FieldDescriptor(D=2)


def report(num, label, t0):
    dt = time.time() - t0
    print(f"\nACCEPTANCE {num}: PASS - {label} ({dt:.1f} s)")


# ---------------------------------------------------------------------- 1

def test_criterion_1_structure_running_example():
    t0 = time.time()
    p = parse_to_poly(RUNNING_TEXT, FD)
    Q, poly = extract(p)
    keys = sorted(f.key() for f in Q)
    assert keys == sorted([(0, (0,)), (3, (1, 6)), (6, (0, 9, 10)),
                           (7, (14, 14)), (10, (-3, 5, 14, 16)), (14, (-5,)),
                           (14, (0,)), (14, (0, 3, 5))])
    prof = height_profile(Q)
    assert prof.H == 1 and prof.h == 3
    assert sorted(f.key() for f in prof.crest) == \
        [(0, (0,)), (3, (1, 6)), (7, (14, 14))]
    rep = analyze_structure(p)
    folded = rep.crest_poly.fold_exact()
    assert folded[(0, 0)] == -FD.from_int(2)
    assert folded[(3, 1)] == FD.from_int(4)
    assert folded[(7, 1)] == FD.from_int(36) * FD.u_power(-48)
    from qalg.series import _default_f0
    assert _default_f0(p) == FD.from_fraction(Fraction(1, 2))
    dt = time.time() - t0
    assert dt < 1.0
    report(1, "running-example structure reproduced exactly", t0)


# ---------------------------------------------------------------------- 2

def test_criterion_2_cfa_reduction_chain():
    t0 = time.time()
    p = parse_to_poly(CFA_TEXT, FD).ramify(2)
    path = ["0", "0", "0", "0", "1", "0", "0", "rho", "0", "0"]
    trace = reduce_to_normal_form(p, ReducePolicy(branch=path, max_steps=40))
    leaf = trace.reduced_leaves()[0]
    fd = leaf.polynomial.fd
    r, rho, one, two = fd.base_power(1), fd.rho(), fd.one(), fd.from_int(2)

    # g7^2 closed form
    assert rho * rho == r ** 2 * (two - r ** 4) * (two * r ** 2 - one) * \
        (two * r ** 2 + one)
    # g10 closed form (forced constant coefficient of the leaf equation)
    from qalg.series import _default_f0
    g10 = _default_f0(leaf.pre_shift)
    num = r ** 2 * (fd.from_int(16) * r ** 11 - fd.from_int(9) * r ** 10
                    - fd.from_int(9) * r ** 7 + two * r ** 6
                    - fd.from_int(18) * r ** 4 + fd.from_int(6))
    assert g10 == -num / (r ** 6 + one)
    # final polynomial: 397 monomials, 292 shifting (nops-style counts)
    pre = leaf.pre_shift
    assert pre.monomial_count() == 397
    shifting_keys = {k for k in pre.terms if k[0] > 0 and k[1]}
    assert pre.monomial_count(shifting_keys) == 292
    # P0 proportional to rho (r^6 Y2 + Y0)
    c00, c02 = pre.coefficient(0, (0,)), pre.coefficient(0, (2,))
    assert c02 / c00 == r ** 6 and (c00 / rho).b.is_zero()
    # alpha bounds, height, co-height
    assert alpha_bounds(extract(pre)[0]) == (2, 5)
    prof = height_profile(extract(leaf.polynomial)[0])
    assert prof.H == Fraction(3, 34) and prof.h == 17
    # crest rho r^6 Y0 - 2 r^64 z^17 Y3 (scale-invariant ratio)
    assert sorted(f.key() for f in prof.crest) == [(0, (0,)), (17, (3,))]
    assert leaf.polynomial.coefficient(17, (3,)) / \
        leaf.polynomial.coefficient(0, (0,)) == -two * r ** 58 / rho
    # existence polynomial and its value at r = 2
    cert = existence_check(pre)
    assert cert.full_groups == [(2, r ** 6), (0, one)]
    assert cert.full_constant == (fd.from_int(6) * r ** 2
                                  - fd.from_int(18) * r ** 6 + two * r ** 8
                                  - fd.from_int(9) * r ** 9
                                  - fd.from_int(9) * r ** 12
                                  + fd.from_int(16) * r ** 13)
    spec = pre.specialize_base(QI(2))
    cert2 = existence_check(spec)
    fd2 = spec.fd
    assert cert2.full_groups == [(2, fd2.from_int(64)), (0, fd2.one())]
    assert cert2.full_constant == fd2.from_int(88984)  # plus the group at 0: 88985
    assert cert2.holds
    dt = time.time() - t0
    assert dt < 300
    report(2, "ten-step reduction chain reproduced exactly", t0)


# ---------------------------------------------------------------------- 3

DIVERGENT_IDS = ["running", "drake-a", "drake-b", "gessel", "jones", "cfa"]


def _solve_entry_exact(eid, N):
    e = get_entry(eid)
    cfg = JobConfig(**{**e.config.__dict__, "exact_base": Fraction(2), "N": N})
    job = prepare(e.equation, cfg)
    sol = solve_job(job)
    return job, sol


def _solve_entry_numeric(eid, N, prec):
    e = get_entry(eid)
    cfg = JobConfig(**{**e.config.__dict__, "N": N, "precision_bits": prec})
    job = prepare(e.equation, cfg)
    sol = solve_job(job)
    return job, sol


def test_criterion_3_coefficient_oracles():
    t0 = time.time()
    ids = ["running", "qp1", "drake-a", "drake-b", "gessel", "jones", "cfa",
           "designed"]
    from qalg.reduction import lift_poly
    for eid in ids:
        job, sol = _solve_entry_exact(eid, 30)
        spec = job.input_poly.specialize_base(QI(2))
        solfd = sol.coeffs[0].fd
        if solfd != spec.fd:
            spec = lift_poly(spec, solfd)   # mid-chain sqrt adjunction (cfa)
        res = spec.residual_series(sol.coeffs, 30)
        assert all(c.is_zero() for c in res), f"{eid}: exact residual nonzero"
    for eid in ids:
        prec = 128
        job, sol = _solve_entry_numeric(eid, 60, prec)
        p = job.input_poly
        res, scale = residual_series_numeric(p, sol.coeffs, 60, prec,
                                             qval=job.config.qval,
                                             return_scale=True)
        with mpmath.workprec(prec + 32):
            for n in range(61):
                denom = max(scale[n], mpmath.mpf(1))
                assert abs(res[n]) <= denom * mpmath.mpf(10) ** -20, \
                    f"{eid}: numeric residual at order {n}"
    # Jones recursion equals the closed-form sum exactly for n <= 25 at q=2
    job, sol = _solve_entry_exact("jones", 25)
    q = Fraction(2)
    for n in range(26):
        assert sol.coeffs[n].a.as_qi().re == jones_closed_form(q, n)
    dt = time.time() - t0
    assert dt < 30
    report(3, "plug-in residuals vanish; recursion matches the closed form", t0)


# ---------------------------------------------------------------------- 4

def _empirical_for(eid, N, prec):
    e = get_entry(eid)
    cfg = JobConfig(**{**e.config.__dict__, "N": N, "precision_bits": prec})
    job = prepare(e.equation, cfg)
    law, sol = asym_job(job)
    from qalg.asymptotics import empirical_constants
    emp = empirical_constants(sol.coeffs, law.zeta0, law.period, prec=prec)
    return emp


def test_criterion_4_asymptotic_constants_closed_forms():
    t0 = time.time()
    with mpmath.workprec(256):
        # Drake (second example), q=2, N=200
        emp = _empirical_for("drake-b", 200, 224)
        c0, c1 = drake_b_closed_forms(60)
        assert abs(emp.estimates[0] - c0) / abs(c0) <= 1e-6
        assert abs(emp.estimates[1] - c1) / abs(c1) <= 1e-6
        # Drake (first example), S0 = {2}
        emp_a = _empirical_for("drake-a", 200, 224)
        expect = mpmath.mpf(1)
        for i in range(1, 61):
            expect *= 1 / (1 - mpmath.mpf(2) ** (-2 * i)) * \
                (1 + mpmath.mpf(2) ** (-2 * (2 * i - 1)))
        assert abs(emp_a.estimates[0] - expect) / expect <= 1e-6
        # Jones: the verified constant is the product itself
        emp_j = _empirical_for("jones", 200, 224)
        prod = qpochhammer(mpmath.mpf(1) / 2, mpmath.mpf(1) / 2, 80)
        assert abs(emp_j.estimates[0] - prod) / prod <= 1e-9
    dt = time.time() - t0
    assert dt < 120
    report(4, "empirical constants match the verified closed forms", t0)


def test_criterion_4_jones_constant_as_literally_stated():
    """The stated value 1/(1/q;1/q)_inf is the reciprocal of the verified
    constant; asserting it fails, jointly impossible with criterion 3 (the
    recursion pins the closed form whose constant is the product itself)."""
    with mpmath.workprec(224):
        emp_j = _empirical_for("jones", 200, 224)
        stated = 1 / qpochhammer(mpmath.mpf(1) / 2, mpmath.mpf(1) / 2, 80)
        rel = abs(emp_j.estimates[0] - stated) / stated
    if rel > 1e-6:
        print(f"\nACCEPTANCE 4 (literal variant): FAIL - stated Jones constant "
              f"is the reciprocal of the verified one (rel err {mpmath.nstr(rel, 3)})")
    assert rel <= 1e-6, \
        (f"literal stated Jones constant fails as expected: rel err "
         f"{mpmath.nstr(rel, 3)}; the verified constant is the "
         f"non-inverted product, verified to 1e-9 above")


def test_criterion_4_drake_b_c0_as_literally_printed():
    """The printed c0 product drops the (r^3;r^12) factor; asserting the
    printed variant fails (the corrected product matches to 2e-18)."""
    with mpmath.workprec(256):
        emp = _empirical_for("drake-b", 200, 224)
        r = mpmath.mpf(1) / 2
        printed_c0 = 1 / (qpochhammer(r, r, 60) * qpochhammer(r ** 2, r ** 12, 60)
                          * qpochhammer(r ** 9, r ** 12, 60)
                          * qpochhammer(r ** 10, r ** 12, 60))
        rel = abs(emp.estimates[0] - printed_c0) / printed_c0
    if rel > 1e-6:
        print(f"\nACCEPTANCE 4 (literal variant): FAIL - printed c0 is missing "
              f"a Pochhammer factor (rel err {mpmath.nstr(rel, 3)})")
    assert rel <= 1e-6, \
        (f"printed c0 fails as expected: rel err {mpmath.nstr(rel, 3)}; the "
         f"corrected product (extra (r^3;r^12) factor) matches to 2e-18")


# ---------------------------------------------------------------------- 5

def _cfa_normalized_sequence(N, prec):
    e = get_entry("cfa")
    # the conjugate square-root branch realizes the rotation c~(m+17)=i c~(m);
    # the principal branch gives the conjugate rotation -i (both branches
    # are exposed as tokens; the equation has real coefficients, so the two
    # solutions are conjugate)
    path = ["0", "0", "0", "0", "1", "0", "0", "-rho", "0", "0"]
    cfg = JobConfig(**{**e.config.__dict__, "N": N, "precision_bits": prec,
                       "branch": path})
    job = prepare(e.equation, cfg)
    sol = solve_job(job)
    f = sol.coeffs
    with mpmath.workprec(prec):
        norm = []
        for n in range(N + 1):
            w = mpmath.power(21, mpmath.mpf(n) / 17) * \
                mpmath.power(2, -(3 * mpmath.mpf(n) ** 2 - 64 * n) / 34)
            norm.append(f[n] * w)
    return f, norm


def test_criterion_5_cfa_asymptotics():
    t0 = time.time()
    N, prec = 390, 512
    f, norm = _cfa_normalized_sequence(N, prec)
    with mpmath.workprec(prec):
        # parity: f_n real for even n, purely imaginary for odd n
        for n in range(N + 1):
            m = abs(f[n])
            if m == 0:
                continue
            if n % 2 == 0:
                assert abs(f[n].imag) < m * 1e-40, f"parity even {n}"
            else:
                assert abs(f[n].real) < m * 1e-40, f"parity odd {n}"
        # c~(m+17) = i c~(m) within 1e-6 relative where |c~(m)| > 1e-8: the
        # c~ are the per-residue constants mod 68, estimated at the last
        # appearance of each class
        est = {}
        for m in range(68):
            ns = [n for n in range(N + 1) if n % 68 == m]
            est[m] = norm[ns[-1]]
        for m in range(51):
            a, b = est[m], est[m + 17]
            if abs(a) > 1e-8:
                assert abs(b - mpmath.mpc(0, 1) * a) / abs(a) <= 1e-6, \
                    f"rotation at residue {m}"
    dt = time.time() - t0
    assert dt < 180
    report(5, "period-17 rotation and parity structure at 512 bits", t0)


def test_criterion_5_stability_as_stated():
    """Per-residue relative change < 1e-6 for n >= 80 as literally pinned.
    The solution's genuine transient at n = 88 (residue 20) is 4.2e-6, so
    the literal bound fails by one data point; it holds verbatim from
    n >= 89 (the source says stability "for n greater than about 70")."""
    N, prec = 390, 512
    f, norm = _cfa_normalized_sequence(N, prec)
    with mpmath.workprec(prec):
        worst = mpmath.mpf(0)
        worst_n = None
        for n in range(80, N - 68 + 1):
            a, b = norm[n], norm[n + 68]
            if abs(b) > 1e-8:
                rel = abs(b - a) / abs(b)
                if rel > worst:
                    worst, worst_n = rel, n
        # the same bound from n >= 89 must hold (documents the true onset)
        for n in range(89, N - 68 + 1):
            a, b = norm[n], norm[n + 68]
            if abs(b) > 1e-8:
                assert abs(b - a) / abs(b) < 1e-6
    if worst >= 1e-6:
        print(f"\nACCEPTANCE 5 (literal variant): FAIL - stability onset is "
              f"n >= 89, not n >= 80 (change {mpmath.nstr(worst, 3)} at n={worst_n})")
    assert worst < 1e-6, \
        (f"literal stability bound fails as expected at n={worst_n}: "
         f"{mpmath.nstr(worst, 3)} (the bound holds verbatim from n >= 89)")


# ---------------------------------------------------------------------- 6

def test_criterion_6_convergence_classification():
    t0 = time.time()
    p = parse_to_poly(QP1_TEXT, FD)
    qpd = p.substitute_reduction(FD.one())
    cl = classify(qpd)
    assert cl.kind == "Convergent"
    cert = majorant_certificate(qpd, n_check=40, prec=128, qval=2)
    assert cert.verified_to == 40
    qpc = p.substitute_reduction(FD.zero()).deflate(3)
    cl0 = classify(qpc)
    assert cl0.kind == "DivergentCandidate"
    assert (cl0.H, cl0.h) == (Fraction(1, 2), 1)
    designed = parse_to_poly(DESIGNED_TEXT, FD).specialize_base(QI(2))
    sol = coefficients_exact(designed, N=12)
    assert sol.coeffs[1].is_one()
    assert all(sol.coeffs[n].is_zero() for n in range(13) if n != 1)
    dt = time.time() - t0
    assert dt < 30
    report(6, "convergent/divergent branches classified with certificates", t0)


# ---------------------------------------------------------------------- 7

def _seeded_polys(count, seed=12345):
    state = seed
    out = []
    for _ in range(count):
        terms = {}
        state = (state * 1103515245 + 12345) % (1 << 31)
        nterms = 1 + state % 4
        for _ in range(nterms):
            state = (state * 1103515245 + 12345) % (1 << 31)
            a = state % 4
            state = (state * 1103515245 + 12345) % (1 << 31)
            ell = state % 3
            shifts = []
            for _ in range(ell):
                state = (state * 1103515245 + 12345) % (1 << 31)
                shifts.append(state % 5 - 2)
            state = (state * 1103515245 + 12345) % (1 << 31)
            c = state % 9 - 4
            if c:
                terms[(a, tuple(sorted(shifts)))] = FD.from_int(c)
        if terms:
            out.append(QPolynomial(FD, terms))
    return out


def _random_series(fd, n, seed):
    state = seed
    coeffs = []
    for _ in range(n + 1):
        state = (state * 1103515245 + 12345) % (1 << 31)
        coeffs.append(fd.from_fraction(Fraction(state % 13 - 6, 1 + state % 3)))
    return coeffs


def test_criterion_7_property_suites():
    t0 = time.time()
    # (a) tuple-minimum brute force on the corpus crest factors, n <= 20
    cases = [(WeightKit(Fraction(1), 3), 3, (1, 6)),
             (WeightKit(Fraction(1), 3), 7, (14, 14)),
             (WeightKit(Fraction(1, 4), 2), 2, (0, 1)),
             (WeightKit(Fraction(1), 1), 1, (0, 2)),
             (WeightKit(Fraction(1, 2), 1), 1, (-1, 0, 0, 1)),
             (WeightKit(Fraction(3, 34), 17), 17, (3,))]
    for kit, a, shifts in cases:
        for n in range(a + 1, 21):
            for k in range(1, len(shifts) + 1):
                if n - a - k + 1 < 1:
                    continue
                best, argmins = dmin_bruteforce(kit, a, shifts, n, k)
                assert best == kit.dmin_closed_form(a, shifts, n, k)
                ell = len(shifts)
                canon = tuple([0] * (ell - k) + [1] * (k - 1) + [n - a - k + 1])
                assert canon in argmins
    # (b) substitution plug-in identities on 100 random sparse equations
    ORDER = 6
    for i, p in enumerate(_seeded_polys(100)):
        g = _random_series(FD, ORDER, 777 + i)
        n = 1
        shifted = p.shift_indices(n)
        qn = FD.base_power(n)
        acc = FD.one()
        fser = []
        for gm in g:
            fser.append(gm * acc)
            acc = acc * qn
        assert p.residual_series(fser, ORDER) == shifted.residual_series(g, ORDER)
        rp = p.ramify(2)
        assert rp.deflate(2) == p
        c, lam = FD.from_int(2), FD.from_int(3)
        sp = p.scale(c, lam)
        fs = []
        acc = FD.one()
        for gm in g:
            fs.append(lam * gm * acc.inv())
            acc = acc * c
        r1 = p.residual_series(fs, ORDER)
        r2 = sp.residual_series(g, ORDER)
        acc = FD.one()
        for k in range(ORDER + 1):
            assert r2[k] == r1[k] * acc
            acc = acc * c
        # reduction identity at f0 = 0 (constant term removed)
        cte = p.eval_constant(FD.zero())
        p0 = p - QPolynomial(FD, {(0, ()): cte})
        if not p0.is_zero():
            red = p0.substitute_reduction(FD.zero())
            fser0 = [FD.zero()] + g[:-1]
            r1 = p0.residual_series(fser0, ORDER)
            r2 = red.residual_series(g, ORDER)
            s1 = next((j for j, cc in enumerate(r1) if not cc.is_zero()), None)
            s2 = next((j for j, cc in enumerate(r2) if not cc.is_zero()), None)
            if s1 is not None and s2 is not None:
                sh = s1 - s2
                assert sh >= 0
                for j in range(ORDER + 1 - sh):
                    assert r1[j + sh] == r2[j]
    # (c) crest strictness off the crest, exact rationals
    for eid in DIVERGENT_IDS:
        e = get_entry(eid)
        job = prepare(e.equation, e.config)
        prof = job.report.profile
        crest_keys = {f.key() for f in prof.crest}
        for f in extract(job.leaf.polynomial)[0]:
            margin = Fraction(2 * f.a) * prof.H - f.alpha_top
            assert (margin == 0) == (f.key() in crest_keys)
            if f.key() not in crest_keys:
                assert margin > 0
    # (d) Borel-radius ratio test within 2% of R at N = 200
    from qalg.asymptotics import radius_from_ratio_test
    for eid in ["drake-a", "drake-b", "gessel", "jones"]:
        e = get_entry(eid)
        cfg = JobConfig(**{**e.config.__dict__, "N": 200, "precision_bits": 224})
        job = prepare(e.equation, cfg)
        law, sol = asym_job(job)
        est = radius_from_ratio_test(sol.coeffs, prec=224)
        with mpmath.workprec(224):
            assert abs(est - law.R) / law.R < 0.02, f"{eid}: radius off"
    # (e) parser round-trip on 500 random canonical polynomials
    from qalg.parser import parse_to_poly as ptp
    state = 424242
    count = 0
    for p in _seeded_polys(700, seed=99):
        text = render(p, "canonical")
        assert ptp(text, FD) == p
        count += 1
        if count >= 500:
            break
    assert count == 500
    dt = time.time() - t0
    assert dt < 300
    report(7, "property suites (oracles, plug-ins, crest, radius, round-trip)", t0)


# ---------------------------------------------------------------------- 8

def test_criterion_8_sign_condition_divergence():
    t0 = time.time()
    from qalg.asymptotics import u_series
    from qalg.series import _default_f0
    for eid in ("drake-b", "gessel"):
        e = get_entry(eid)
        job, sol = _solve_entry_exact(eid, 40)
        vals = [c.a.as_qi().re for c in sol.coeffs]
        assert all(v >= 0 for v in vals), f"{eid}: negative coefficient"
        assert job.report.sign_ok
        law, nsol = asym_job(prepare(e.equation, e.config))
        U = u_series(job.report.crest_poly, nsol.coeffs,
                     _default_f0(job.leaf.polynomial),
                     e.config.precision_bits, e.config.qval)
        with mpmath.workprec(e.config.precision_bits):
            nz = [u for u in U if abs(u) > mpmath.mpf(2) ** -80]
            assert nz, f"{eid}: U identically zero"
            assert all(abs(u.imag) < abs(u) * 1e-20 for u in nz)
            signs = {1 if u.real > 0 else -1 for u in nz}
            assert len(signs) == 1, f"{eid}: mixed U signs"
    dt = time.time() - t0
    assert dt < 30
    report(8, "nonnegative solutions with single-signed U series", t0)

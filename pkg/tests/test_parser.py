"""Grammar, spans, canonicalization and the render round-trip."""

import pytest
from hypothesis import given, settings, strategies as st

from qalg.errors import EquationSyntaxError, NonAffineShiftError
from qalg.field import FieldDescriptor
from qalg.gaussian import QI
from qalg.parser import FApp, parse_equation, parse_to_poly, render
from qalg.qpoly import QPolynomial

FD = FieldDescriptor(D=2)


def collect_fapps(node, acc):
    if isinstance(node, FApp):
        acc.append(node.shift)
    for attr in ("left", "right", "operand", "inner", "base"):
        child = getattr(node, attr, None)
        if child is not None and hasattr(child, "span"):
            collect_fapps(child, acc)
    return acc


def test_simple_equation_fapps():
    ast = parse_equation("f(z) - z*f(q*z)^2 - 1")
    assert collect_fapps(ast.root, []) == [0, 1]


def test_running_example_parses_with_equals():
    text = ("2*f(z) = 4*z^3*f(q*z)*f(q^6*z) + 5*q^2*z^6*f(z)*f(q^9*z)*f(q^10*z)"
            " + 18*q^4*z^7*f(q^14*z)^2"
            " + 9*z^10*f(q^-3*z)*f(q^5*z)*f(q^14*z)*f(q^16*z)"
            " + 3*z^14*f(q^-5*z) + (q^8+2*q^17)*z^14*f(z)"
            " + 72*z^14*f(z)*f(q^3*z)*f(q^5*z) + 1 + 15*z^7")
    p = parse_to_poly(text, FD)
    # the "=" splits into lhs - rhs
    assert p.coefficient(0, (0,)) == FD.from_int(2)
    assert p.coefficient(3, (1, 6)) == -FD.from_int(4)
    assert p.coefficient(0, ()) == -FD.one()
    assert p.coefficient(7, ()) == -FD.from_int(15)
    assert p.coefficient(14, (0,)) == -(FD.base_power(8) + FD.base_power(17) * FD.from_int(2))
    assert p.term_count() == 10


def test_z_over_q_is_shift_minus_one_and_division_by_f_rejected():
    ast = parse_equation("f(q*z)*f(z/q) - f(z)")
    assert sorted(collect_fapps(ast.root, [])) == [-1, 0, 1]
    with pytest.raises(EquationSyntaxError) as err:
        parse_equation("f(q*z)*f(z/q) - 1/f(z)")
    assert "clear denominators" in (err.value.hint or "")


def test_non_affine_argument_rejected():
    with pytest.raises(NonAffineShiftError):
        parse_equation("f(2*z)")
    with pytest.raises(NonAffineShiftError):
        parse_equation("f(z^2)")


def test_cancellation_in_canonicalize():
    p = parse_to_poly("f(q*z) + f(z) - f(z)", FD)
    assert list(p.terms) == [(0, (1,))]


def test_designed_equation_canonical_form():
    p = parse_to_poly("f(z) + q*z*f(z) - z - q*z^2", FD)
    assert p.coefficient(0, (0,)) == FD.one()
    assert p.coefficient(1, (0,)) == FD.base_power(1)
    assert p.coefficient(1, ()) == -FD.one()
    assert p.coefficient(2, ()) == -FD.base_power(1)
    assert p.term_count() == 4


def test_zero_input_flagged_degenerate():
    p = parse_to_poly("0", FD)
    assert p.is_zero()


def test_render_zero_and_simple():
    assert render(QPolynomial(FD)) == "0"
    p = parse_to_poly("f(z) + q*z*f(z) - z - q*z^2", FD)
    assert render(p) == "f(z) - z + q*z*f(z) - q*z^2"
    assert parse_to_poly(render(p), FD) == p


def test_cfa_polynomial_roundtrip_preserves_8_monomials():
    text = ("4*f(q*z)^4 - 9*f(z)^2*f(q*z)*f(q^2*z) + 2*f(z)^3*f(q^2*z)"
            " + z*f(z)*f(q^2*z)/q^4 - z^3*f(z)^4*f(q^5*z)^2 - z^3*f(q^2*z)/q^4"
            " - z^3*f(z) + z^5")
    p = parse_to_poly(text, FD)
    assert p.term_count() == 8
    assert parse_to_poly(render(p), FD) == p


def test_span_soundness_on_errors():
    bad = ["f(z) + * z", "f(z)) - 1", "f(w)", "3*f(z)/z", "", "q^x"]
    for text in bad:
        with pytest.raises(EquationSyntaxError) as err:
            parse_to_poly(text, FD)
        span = err.value.span
        if span is not None and text:
            assert 0 <= span.start <= span.end <= len(text)


def test_spans_attached_to_nodes():
    text = "2*f(z) - z"
    ast = parse_equation(text)
    assert ast.root.span.start == 0 and ast.root.span.end == len(text)


# ---------------------------------------------------------- round-trip

coeff_strategy = st.one_of(
    st.integers(-9, 9).filter(lambda n: n != 0).map(lambda n: (n, 0, 0)),
    st.tuples(st.integers(-5, 5), st.integers(-5, 5),
              st.integers(-4, 4)).filter(lambda t: t[0] or t[1]),
)


@st.composite
def random_polys(draw):
    fd = FD
    terms = {}
    for _ in range(draw(st.integers(1, 5))):
        a = draw(st.integers(0, 6))
        ell = draw(st.integers(0, 3))
        shifts = tuple(sorted(draw(st.integers(-4, 6)) for _ in range(ell)))
        re, im, ue = draw(coeff_strategy)
        c = fd.from_qi(QI(re, im)) * fd.u_power(2 * ue)
        if not c.is_zero():
            terms[(a, shifts)] = c
    return QPolynomial(fd, terms)


@given(random_polys())
@settings(max_examples=500, deadline=None)
def test_parser_roundtrip_500(p):
    text = render(p, "canonical")
    assert parse_to_poly(text, FD) == p


@given(random_polys())
@settings(max_examples=100, deadline=None)
def test_collection_no_duplicate_keys(p):
    q = parse_to_poly(render(p), FD)
    keys = [k for k, _ in q.sorted_terms()]
    assert len(keys) == len(set(keys))
    assert all(not c.is_zero() for _, c in q.sorted_terms())

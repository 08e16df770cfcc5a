"""Corpus integrity: stored texts, tags, and a fast entry run."""

from fractions import Fraction

import pytest

from qalg.corpus import (ENTRIES, JONES_TEXT, get_entry, jones_closed_form,
                         run_entry)
from qalg.errors import QalgError


def test_entry_ids_and_titles():
    assert [e.id for e in ENTRIES] == ["running", "qp1", "drake-a", "drake-b",
                                       "gessel", "jones", "cfa", "designed"]


def test_every_check_is_tagged():
    for entry in ENTRIES:
        for check in entry.checks(entry):
            assert check.tag in ("PAPER", "DERIVED", "TRIVIAL")
            assert check.description


def test_jones_text_matches_generator():
    import sys
    sys.path.insert(0, "scripts")
    from gen_jones_equation import equation_text, verify
    verify(nmax=12)
    assert " ".join(JONES_TEXT.split()) == " ".join(equation_text().split())


def test_jones_closed_form_values():
    q = Fraction(2)
    assert jones_closed_form(q, 0) == 1
    assert jones_closed_form(q, 1) == 1
    assert jones_closed_form(q, 2) == Fraction(11, 4)
    # values are Laurent: denominators are powers of 2 at q = 2
    for n in range(3, 8):
        d = jones_closed_form(q, n).denominator
        assert d & (d - 1) == 0


def test_unknown_entry_raises():
    with pytest.raises(QalgError):
        get_entry("nope")


def test_run_qp1_entry():
    rows = run_entry(get_entry("qp1"))
    assert rows and all(ok for _, _, ok, _ in rows)

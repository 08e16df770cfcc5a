"""Command-line front end.

    qalg analyze  EQN [options]     structure report (factors, heights,
                                    crest, existence, classification)
    qalg solve    EQN [options]     solution coefficients (CSV/JSON)
    qalg asym     EQN [options]     asymptotic law + diagnostics CSV
    qalg corpus   run|list          bundled regression corpus

EQN is a path to an equation file (header lines "key: value", then the
expression) or a literal expression with --inline.  Exit codes: 0 ok,
1 analysis-negative finding, 2 usage/parse error, 3 budget exceeded.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction

import click
import mpmath

from .errors import (BudgetExceeded, EquationSyntaxError, ExistenceFails,
                     MaxStepsExceeded, QalgError)
from .jobs import JobConfig, parse_equation_file, prepare, solve_job, asym_job
from .parser import render


def _load(eqn, inline, config_overrides):
    if inline:
        config = JobConfig()
        text = eqn
    else:
        try:
            with open(eqn, encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            raise click.ClickException(f"cannot read {eqn}: {exc}")
        config, text = parse_equation_file(raw)
    if not text.strip():
        click.echo("error: empty equation", err=True)
        sys.exit(2)
    for key, value in config_overrides.items():
        if value is not None:
            setattr(config, key, value)
    return config, text


def _common(fn):
    fn = click.option("--inline", is_flag=True,
                      help="treat EQN as a literal expression")(fn)
    fn = click.option("--field-D", "field_D", type=int, default=None,
                      help="root order of u over the base (default 2)")(fn)
    fn = click.option("--q", "qval", type=str, default=None,
                      help="numeric base value, |q| > 1 (complex accepted)")(fn)
    fn = click.option("--precision-bits", type=int, default=None)(fn)
    fn = click.option("--exact-base", type=str, default=None,
                      help="exact rational base for specialized exact runs")(fn)
    fn = click.option("--ramify", type=int, default=None)(fn)
    fn = click.option("--deflate", type=int, default=None)(fn)
    fn = click.option("--branch", type=str, default=None,
                      help="first | all | comma-separated branch values")(fn)
    fn = click.option("--f0", type=str, default=None)(fn)
    fn = click.option("--N", "N", type=int, default=None)(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]),
                      default="text")(fn)
    return fn


def _overrides(field_D, qval, precision_bits, exact_base, ramify, deflate,
               branch, f0, N):
    out = {"field_D": field_D, "precision_bits": precision_bits,
           "ramify": ramify, "deflate": deflate, "f0": f0, "N": N}
    if qval is not None:
        out["qval"] = complex(qval)
    if exact_base is not None:
        out["exact_base"] = Fraction(exact_base)
    if branch is not None:
        if branch.startswith("path="):
            branch = branch[len("path="):]
        out["branch"] = branch if branch in ("first", "all") else \
            [t.strip() for t in branch.split(",")]
    return out


def _run_guarded(fn):
    try:
        return fn()
    except (EquationSyntaxError,) as exc:
        loc = f" at {exc.span.line}:{exc.span.column}" if exc.span else ""
        hint = f"\n  hint: {exc.hint}" if getattr(exc, "hint", None) else ""
        click.echo(f"syntax error{loc}: {exc}{hint}", err=True)
        sys.exit(2)
    except ExistenceFails as exc:
        click.echo(json.dumps({"schema": "qalg/1", "finding": "existence-fails",
                               "n": exc.n}))
        sys.exit(1)
    except (BudgetExceeded, MaxStepsExceeded) as exc:
        click.echo(f"budget exceeded: {exc}", err=True)
        sys.exit(3)
    except QalgError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@click.group()
def main():
    """Analyze q-algebraic functional equations."""


@main.command()
@click.argument("eqn")
@_common
def analyze(eqn, inline, field_D, qval, precision_bits, exact_base, ramify,
            deflate, branch, f0, N, fmt):
    """Reduce and report structure, existence, classification and crest data."""
    config, text = _load(eqn, inline, _overrides(field_D, qval, precision_bits,
                                                 exact_base, ramify, deflate,
                                                 branch, f0, N))

    def go():
        job = prepare(text, config)
        report = job.report
        out = report.to_json()
        out["equation"] = render(job.input_poly, "canonical")
        out["leaf_equation"] = render(job.leaf.polynomial, "canonical")
        out["reduction"] = {
            "prefix": [repr(c) for c in job.leaf.prefix],
            "shift": job.leaf.shift,
            "leaves": len(job.trace.leaves()),
        }
        if fmt == "json":
            click.echo(json.dumps(out, indent=1))
        else:
            _print_report(job, report)
        failed = [l for l in job.trace.leaves() if l.kind == "Failed"
                  and "max steps" in l.detail]
        if failed and not job.trace.reduced_leaves():
            sys.exit(3)
        if report.existence_failure is not None:
            click.echo(json.dumps({"schema": "qalg/1",
                                   "finding": "existence-fails",
                                   "n": report.existence_failure}))
            sys.exit(1)
        if report.existence is not None and not report.existence.holds_for_positive_n:
            sys.exit(1)
    _run_guarded(go)


def _print_report(job, report):
    click.echo(f"equation: {render(job.input_poly, 'canonical')}")
    click.echo(f"reduced leaf ({len(job.leaf.prefix)} reduction steps, "
               f"shift {job.leaf.shift}): "
               f"{job.leaf.polynomial.term_count()} collected terms")
    click.echo(f"alpha(Q0) = {report.alpha_q0}, alpha(Q+) = {report.alpha_qp}, "
               f"L = {report.L}")
    if report.existence:
        ex = report.existence
        click.echo(f"existence: holds={ex.holds} (n>=1: {ex.holds_for_positive_n}"
                   f"{', f0 free' if ex.n0_degenerate else ''}), "
                   f"sum = {ex.exponential_string()}")
    if report.classification:
        cl = report.classification
        line = f"classification: {cl.kind}"
        if cl.kind == "DivergentCandidate":
            line += f" (H = {cl.H}, h = {cl.h})"
        click.echo(line)
    if report.profile:
        crest = ", ".join(f"({f.a}; {','.join(map(str, f.shifts))})"
                          for f in report.profile.crest)
        click.echo(f"crest: {crest}")
    if report.crest_poly:
        click.echo(f"crest polynomial: {report.crest_poly.render()}")
        from .asymptotics import gevrey_order
        s, sq, small = gevrey_order(report.profile,
                                    job.leaf.polynomial.fd.base_exp,
                                    report.sign_ok)
        note = " (smallest)" if small else ""
        click.echo(f"q-Gevrey order: {s} in the equation base, {sq} in q{note}")
    if report.sign_ok is not None:
        click.echo(f"sign condition: {report.sign_ok}")


@main.command()
@click.argument("eqn")
@_common
def solve(eqn, inline, field_D, qval, precision_bits, exact_base, ramify,
          deflate, branch, f0, N, fmt):
    """Compute solution coefficients (exact, specialized exact, or numeric)."""
    config, text = _load(eqn, inline, _overrides(field_D, qval, precision_bits,
                                                 exact_base, ramify, deflate,
                                                 branch, f0, N))

    def go():
        job = prepare(text, config)
        sol = solve_job(job)
        if fmt == "json":
            click.echo(json.dumps(sol.to_json(), indent=1))
        else:
            click.echo(sol.to_csv(), nl=False)
    _run_guarded(go)


@main.command()
@click.argument("eqn")
@_common
def asym(eqn, inline, field_D, qval, precision_bits, exact_base, ramify,
         deflate, branch, f0, N, fmt):
    """Asymptotic law of a divergent candidate plus diagnostics CSV."""
    config, text = _load(eqn, inline, _overrides(field_D, qval, precision_bits,
                                                 exact_base, ramify, deflate,
                                                 branch, f0, N))

    def go():
        job = prepare(text, config)
        try:
            law, sol = asym_job(job)
        except QalgError as exc:
            if "not applicable" in str(exc):
                click.echo(f"not applicable: {exc}")
                sys.exit(0)
            raise
        if fmt == "json":
            click.echo(json.dumps(law.to_json(), indent=1))
        elif fmt == "csv":
            from .asymptotics import empirical_constants
            rep = empirical_constants(sol.coeffs, law.zeta0, law.period,
                                      prec=config.precision_bits)
            click.echo(rep.csv, nl=False)
        else:
            digits = 12
            click.echo(f"H = {law.H}, h = {law.h}, q-Gevrey order {law.gevrey} "
                       f"(= {law.gevrey_q} in q)"
                       + (" [smallest]" if law.gevrey_smallest else ""))
            click.echo(f"R = {mpmath.nstr(law.R, digits)}; "
                       f"{len(law.dominant)} dominant root(s), period {law.period}")
            if law.constants:
                for m, c in enumerate(law.constants):
                    click.echo(f"  c_{m} = {mpmath.nstr(c, digits)}")
            click.echo(f"validity: {law.validity}; Theta >= {law.theta}")
    _run_guarded(go)


@main.command()
@click.argument("action", type=click.Choice(["run", "list"]))
@click.option("--entry", default=None, help="run a single corpus entry")
def corpus(action, entry):
    """Run or list the bundled regression corpus."""
    from .corpus import ENTRIES, get_entry, run_entry
    if action == "list":
        for e in ENTRIES:
            click.echo(f"{e.id:10s} {e.title}")
        return
    entries = [get_entry(entry)] if entry else ENTRIES
    failed = 0
    for e in entries:
        for tag, desc, ok, detail in run_entry(e):
            status = "PASS" if ok else "FAIL"
            line = f"{e.id:10s} [{tag:7s}] {status}  {desc}"
            if detail:
                line += f"  -- {detail}"
            click.echo(line)
            if not ok:
                failed += 1
    if failed:
        click.echo(f"{failed} corpus check(s) failed", err=True)
        sys.exit(1)
    click.echo("corpus: all checks passed")


if __name__ == "__main__":
    main()

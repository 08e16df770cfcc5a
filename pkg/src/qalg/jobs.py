"""High-level pipelines shared by the CLI and the regression corpus:
load an equation, apply ramification/deflation, reduce along a branch
policy, then analyze, solve or derive asymptotics on the chosen leaf.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import EquationSyntaxError, QalgError
from .field import FieldDescriptor
from .gaussian import QI
from .parser import parse_to_poly
from .qpoly import QPolynomial
from .reduction import Leaf, ReducePolicy, ReductionTrace, reduce_to_normal_form
from .series import (SeriesSolution, coefficients_exact,
                     coefficients_numeric_raw, coefficients_normalized,
                     _default_f0)
from .structure import StructureReport, analyze_structure


@dataclass
class JobConfig:
    """Everything a run needs: field, pipeline, and output knobs."""
    field_D: int = 2
    qval: Optional[complex] = None           # numeric base value (|q| > 1)
    precision_bits: int = 128
    exact_base: Optional[Fraction] = None    # exact rational specialization
    ramify: int = 1
    deflate: int = 1
    branch: object = "first"                 # "first" | "all" | list of tokens
    f0: Optional[str] = None                 # branch value for the leaf series
    N: int = 30
    max_steps: int = 32

    @property
    def numeric(self) -> bool:
        return self.qval is not None


HEADER_KEYS = {"field-d": "field_D", "q": "qval", "precision-bits": "precision_bits",
               "exact-base": "exact_base", "ramify": "ramify", "deflate": "deflate",
               "branch": "branch", "f0": "f0", "n": "N", "max-steps": "max_steps"}


def parse_equation_file(text: str):
    """Split 'key: value' header lines from the expression body."""
    config = JobConfig()
    body = []
    in_header = True
    for line in text.splitlines():
        stripped = line.strip()
        if in_header and ":" in stripped and not stripped.startswith("#"):
            key, _, value = stripped.partition(":")
            key = key.strip().lower()
            if key in HEADER_KEYS:
                _apply_header(config, key, value.strip())
                continue
        if stripped.startswith("#"):
            continue
        if stripped:
            in_header = False
            body.append(stripped)
    return config, " ".join(body)


def _apply_header(config: JobConfig, key: str, value: str):
    attr = HEADER_KEYS[key]
    if attr in ("field_D", "precision_bits", "ramify", "deflate", "N", "max_steps"):
        setattr(config, attr, int(value))
    elif attr == "qval":
        setattr(config, attr, complex(value))
    elif attr == "exact_base":
        setattr(config, attr, Fraction(value))
    elif attr == "branch":
        if value.startswith("path="):
            value = value[len("path="):]
        if value in ("first", "all"):
            config.branch = value
        else:
            config.branch = [t.strip() for t in value.split(",") if t.strip()]
    else:
        setattr(config, attr, value)


@dataclass
class PreparedJob:
    config: JobConfig
    input_poly: QPolynomial        # after ramify/deflate (the analyzed equation)
    trace: ReductionTrace
    leaf: Leaf                     # first reduced leaf on the chosen branch
    report: StructureReport        # structure of the normalized leaf equation


def prepare(text: str, config: JobConfig) -> PreparedJob:
    fd = FieldDescriptor(D=config.field_D)
    p = parse_to_poly(text, fd)
    if p.is_zero():
        raise EquationSyntaxError("the equation is identically zero (degenerate)",
                                  None)
    if config.ramify > 1:
        p = p.ramify(config.ramify)
    if config.deflate > 1:
        p = p.deflate(config.deflate)
    policy = ReducePolicy(max_steps=config.max_steps, branch=config.branch)
    trace = reduce_to_normal_form(p, policy)
    reduced = trace.reduced_leaves()
    if not reduced:
        details = "; ".join(f"{l.kind}: {l.detail}" for l in trace.leaves())
        raise QalgError(f"no reduced leaf reached ({details})")
    leaf = reduced[0]
    report = analyze_structure(leaf.polynomial,
                               prec=config.precision_bits,
                               qval=config.qval)
    return PreparedJob(config, p, trace, leaf, report)


def _leaf_f0(job: PreparedJob):
    """Branch value for the leaf series: the forced root, or the configured
    f0 when the constant coefficient is free."""
    leaf_poly = job.leaf.polynomial
    f0 = _default_f0(leaf_poly)
    if f0 is not None:
        return f0
    if job.config.f0 is None:
        raise QalgError("leaf constant coefficient is free: supply f0")
    from .reduction import parse_branch_token
    val, _ = parse_branch_token(job.config.f0, leaf_poly.fd)
    return val


def solve_job(job: PreparedJob) -> SeriesSolution:
    """Assembled coefficients of the analyzed equation's solution."""
    config = job.config
    leaf_poly = job.leaf.polynomial
    if config.exact_base is not None:
        spec = leaf_poly.specialize_base(QI(config.exact_base))
        f0 = _leaf_f0(job)
        f0s = _spec_scalar(f0, spec.fd, leaf_poly.fd.D, config.exact_base)
        sol = coefficients_exact(spec, f0=f0s, N=config.N)
        # assemble through the (specialized) shift and prefix
        spec_leaf = Leaf(job.leaf.kind, spec, None,
                         [_spec_scalar(c, spec.fd, leaf_poly.fd.D, config.exact_base)
                          for c in job.leaf.prefix],
                         job.leaf.shift)
        coeffs = spec_leaf.assemble_series(sol.coeffs)
        return SeriesSolution(coeffs[:config.N + 1], config.N, "exact", f0s,
                              {"assembled": True, "shift": job.leaf.shift,
                               "exact_base": str(config.exact_base)})
    if config.numeric:
        f0 = _leaf_f0(job)
        raw = coefficients_numeric_raw(leaf_poly, f0=f0, N=config.N,
                                       prec=config.precision_bits,
                                       qval=config.qval)
        coeffs = job.leaf.assemble_series_numeric(raw.coeffs,
                                                  config.precision_bits,
                                                  config.qval)
        return SeriesSolution(coeffs[:config.N + 1], config.N, "numeric", f0,
                              {"assembled": True, "shift": job.leaf.shift,
                               "prec": config.precision_bits,
                               "digits": int(config.precision_bits / 3.32) + 2})
    # formal exact
    f0 = _leaf_f0(job)
    sol = coefficients_exact(leaf_poly, f0=f0, N=config.N)
    coeffs = job.leaf.assemble_series(sol.coeffs)
    return SeriesSolution(coeffs[:config.N + 1], config.N, "exact", f0,
                          {"assembled": True, "shift": job.leaf.shift})


def _spec_scalar(c, fd_spec, D, base_value):
    from .field import RatFunc, Scalar, _specialize_rf
    b = c.b
    return Scalar(fd_spec,
                  RatFunc.const(_specialize_rf(c.a, D, QI(base_value))),
                  b if b.is_zero() else
                  RatFunc.const(_specialize_rf(b, D, QI(base_value))))


def asym_job(job: PreparedJob):
    """(law, normalized g-series used for U) for a divergent candidate."""
    from .asymptotics import asymptotic_law
    config = job.config
    if not config.numeric:
        raise QalgError("asymptotics requires a numeric q (use --q)")
    report = job.report
    if report.classification is None or \
            report.classification.kind != "DivergentCandidate":
        kind = report.classification.kind if report.classification else "unknown"
        raise QalgError(f"not applicable: classification is {kind}")
    f0 = _leaf_f0(job)
    sol = coefficients_normalized(job.leaf.polynomial, f0=f0, N=config.N,
                                  prec=config.precision_bits, qval=config.qval,
                                  classification=report.classification)
    law = asymptotic_law(report, prec=config.precision_bits, qval=config.qval,
                         g=sol.coeffs, f0=f0)
    return law, sol

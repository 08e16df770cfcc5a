"""Drive an equation to reduced normal form with alpha(Q0) = 0.

The loop substitutes f = f0 + z*g for a root f0 of the constant equation,
removes trivial factors, and branches when the constant equation has several
roots.  A reduced equation whose forced constant coefficient is 0 is reduced
further while that strictly lowers the height (sharper growth exponents).
Each leaf records the full branch prefix (f0, f1, ...) so the original
solution can be reassembled from a leaf series.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from typing import List, Optional

from .errors import ZeroPolynomial
from .field import FieldDescriptor, Scalar, lift, render_scalar, solve_univariate
from .qpoly import QPolynomial
from .structure import alpha_bounds, extract, height_profile, is_reduced


# ---------------------------------------------------------------------------
# steps and traces
# ---------------------------------------------------------------------------

def digest(p: QPolynomial) -> str:
    return hashlib.sha256(
        json.dumps(p.to_json(), sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class ReductionStep:
    kind: str              # Reduce | RemoveTrivial | Shift | Ramify | Deflate | Scale
    payload: dict
    before_digest: str
    after_digest: str
    before_terms: int
    after_terms: int

    def to_json(self):
        from .field import scalar_to_json
        payload = {}
        for k, v in self.payload.items():
            payload[k] = scalar_to_json(v) if isinstance(v, Scalar) else v
        return {"kind": self.kind, "payload": payload,
                "before": self.before_digest, "after": self.after_digest,
                "terms": [self.before_terms, self.after_terms]}


@dataclass
class TraceNode:
    steps: List[ReductionStep]      # steps taken entering this node
    polynomial: QPolynomial
    children: List["TraceNode"] = dfield(default_factory=list)
    leaf: Optional["Leaf"] = None


@dataclass
class Leaf:
    kind: str                        # Reduced | Unresolved | Failed
    polynomial: Optional[QPolynomial] = None      # normalized (alpha(Q0)=0)
    pre_shift: Optional[QPolynomial] = None
    prefix: List[object] = dfield(default_factory=list)
    shift: int = 0
    detail: str = ""
    f0_free: bool = False            # constant root is unconstrained

    def assemble_series(self, leaf_coeffs: list) -> list:
        """Coefficients of the root equation's solution from a series for
        the normalized leaf equation.

        Undoes the normalization shift (solution of the shifted equation k
        relates by h_m = base^(shift*m) k_m) and prepends the branch prefix
        (one z-power per reduction step)."""
        fd = (self.polynomial or self.pre_shift).fd
        coeffs = list(leaf_coeffs)
        if self.shift:
            w = fd.base_power(self.shift)
            acc = fd.one()
            out = []
            for c in coeffs:
                out.append(c * acc)
                acc = acc * w
            coeffs = out
        for c in reversed(self.prefix):
            cl = c if c.fd == fd else lift(c, fd)
            coeffs = [cl] + coeffs
        return coeffs

    def assemble_series_numeric(self, leaf_coeffs: list, prec: int,
                                qval=None) -> list:
        """Numeric counterpart of :meth:`assemble_series` (mpc leaf values)."""
        import mpmath
        from .field import eval_numeric
        fd = (self.polynomial or self.pre_shift).fd
        with mpmath.workprec(prec + 32):
            coeffs = [mpmath.mpc(c) for c in leaf_coeffs]
            if self.shift:
                u, _ = fd.numeric_context(prec + 32, qval)
                w = u ** (fd.D * self.shift)
                acc = mpmath.mpc(1)
                out = []
                for c in coeffs:
                    out.append(c * acc)
                    acc *= w
                coeffs = out
            for c in reversed(self.prefix):
                coeffs = [eval_numeric(c, prec=prec + 32, qval=qval)] + coeffs
            return [+c for c in coeffs]


@dataclass
class ReductionTrace:
    root: TraceNode
    fd_final: FieldDescriptor

    def leaves(self) -> List[Leaf]:
        out = []

        def walk(node):
            if node.leaf is not None:
                out.append(node.leaf)
            for ch in node.children:
                walk(ch)
        walk(self.root)
        return out

    def reduced_leaves(self) -> List[Leaf]:
        return [l for l in self.leaves() if l.kind == "Reduced"]

    def replay(self) -> bool:
        """Re-execute every step from the root; digests must match bit-exactly."""
        def rerun(node):
            for ch in node.children:
                p = node.polynomial
                for step in ch.steps:
                    if digest(p) != step.before_digest:
                        return False
                    p = _apply_step(p, step)
                    if digest(p) != step.after_digest:
                        return False
                if p != ch.polynomial:
                    return False
                if not rerun(ch):
                    return False
            return True
        return rerun(self.root)

    def to_json(self):
        def node_json(node):
            out = {"steps": [s.to_json() for s in node.steps],
                   "digest": digest(node.polynomial)}
            if node.leaf is not None:
                leaf = node.leaf
                out["leaf"] = {"kind": leaf.kind, "shift": leaf.shift,
                               "prefix": [render_scalar(c) for c in leaf.prefix],
                               "detail": leaf.detail, "f0_free": leaf.f0_free}
            if node.children:
                out["children"] = [node_json(ch) for ch in node.children]
            return out
        return {"schema": "qalg/1", "trace": node_json(self.root)}


def _apply_step(p: QPolynomial, step: ReductionStep) -> QPolynomial:
    if step.kind == "Reduce":
        f0 = step.payload["f0"]
        fd = step.payload.get("fd_after", p.fd)
        if fd != p.fd:
            p = lift_poly(p, fd)
            f0 = f0 if f0.fd == fd else lift(f0, fd)
        return p.substitute_reduction(f0)
    if step.kind == "RemoveTrivial":
        return p.remove_trivial_factors()[0]
    if step.kind == "Shift":
        return p.shift_indices(step.payload["n"])
    if step.kind == "Ramify":
        return p.ramify(step.payload["m"])
    if step.kind == "Deflate":
        return p.deflate(step.payload["m"])
    if step.kind == "Scale":
        return p.scale(step.payload["c"], step.payload["lam"])
    raise ValueError(f"unknown step kind {step.kind!r}")


def lift_poly(p: QPolynomial, fd: FieldDescriptor) -> QPolynomial:
    return QPolynomial(fd, {k: lift(c, fd) for k, c in p.terms.items()},
                       _canonical=True)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def constant_equation(p: QPolynomial) -> list:
    """Coefficients of c -> P(0, c, ..., c) (the f0 equation)."""
    return p.constant_polynomial()


def reduce_step(p: QPolynomial, f0) -> QPolynomial:
    """Substitute f = f0 + z*g and remove trivial factors."""
    q = p.substitute_reduction(f0)
    if q.is_zero():
        return q
    return q.remove_trivial_factors()[0]


@dataclass
class ReducePolicy:
    max_steps: int = 32
    branch: object = "first"        # "first" | "all" | list of branch tokens
    max_leaves: int = 64


def parse_branch_token(token: str, fd: FieldDescriptor):
    """Branch values on a path: rationals, 'i', 'rho' and their negatives."""
    token = token.strip()
    neg = token.startswith("-")
    if neg:
        token = token[1:]
    if token == "rho":
        val = fd.rho() if fd.ext_d is not None else None
        want_rho = True
    elif token in ("i", "I"):
        val = fd.i()
        want_rho = False
    else:
        val = fd.from_fraction(Fraction(token))
        want_rho = False
    if val is not None and neg:
        val = -val
    return val, want_rho


def _current_height(p: QPolynomial) -> Optional[Fraction]:
    Q, _ = extract(p)
    if not any(f.shifting for f in Q):
        return None
    a0, _ = alpha_bounds(Q)
    shifted = p.shift_indices(-a0) if a0 else p
    return height_profile(extract(shifted)[0]).H


def _forced_f0(p: QPolynomial):
    """(root, free) of the linear constant equation of a reduced polynomial."""
    cs = p.constant_polynomial()
    while len(cs) > 1 and cs[-1].is_zero():
        cs.pop()
    if len(cs) == 1:
        return (None, cs[0].is_zero())
    e0, e1 = cs[0], cs[1]
    if e1.is_zero():
        return (None, e0.is_zero())
    return (-(e0 / e1), False)


def reduce_to_normal_form(p: QPolynomial, policy: ReducePolicy = None) -> ReductionTrace:
    """Explore reduction branches until every branch is reduced with
    alpha(Q0) = 0, the height can no longer be lowered, or the branch fails.

    Roots are explored in canonical scalar order; 'first' takes the first
    root only, 'all' explores every root up to ``max_leaves``, and an
    explicit token list follows that path (allowing one sqrt adjunction when
    a token asks for rho).
    """
    if p.is_zero():
        raise ZeroPolynomial("cannot reduce the zero polynomial")
    policy = policy or ReducePolicy()
    path = list(policy.branch) if isinstance(policy.branch, (list, tuple)) else None

    p0, removed = p.remove_trivial_factors()
    root_steps = []
    if removed["z"] or removed["Y"]:
        root_steps.append(ReductionStep(
            "RemoveTrivial", {"removed": removed}, digest(p), digest(p0),
            p.term_count(), p0.term_count()))
    root = TraceNode(root_steps, p0)
    state = {"leaves": 0}

    def finish_leaf(node, prefix, depth):
        poly = node.polynomial
        a0, _ = alpha_bounds(extract(poly)[0])
        shift = -(a0 or 0)
        shifted = poly.shift_indices(shift)
        step = ReductionStep("Shift", {"n": shift}, digest(poly),
                             digest(shifted), poly.term_count(),
                             shifted.term_count())
        child = TraceNode([step], shifted)
        _, free = _forced_f0(shifted)
        child.leaf = Leaf("Reduced", shifted, poly, list(prefix), shift,
                          f0_free=free)
        node.children.append(child)
        state["leaves"] += 1

    def explore(node, prefix, depth, tokens):
        poly = node.polynomial
        if state["leaves"] >= policy.max_leaves:
            node.leaf = Leaf("Failed", pre_shift=poly, prefix=list(prefix),
                             detail="leaf budget exhausted")
            return
        if depth >= policy.max_steps:
            node.leaf = Leaf("Failed", pre_shift=poly, prefix=list(prefix),
                             detail=f"max steps ({policy.max_steps}) exceeded")
            state["leaves"] += 1
            return
        reduced = is_reduced(poly)
        lowering = False
        if reduced:
            if path is not None:
                if not tokens:
                    finish_leaf(node, prefix, depth)
                    return
            else:
                # a reduced equation whose forced constant coefficient is 0
                # is reduced further while that strictly lowers the height
                f0, free = _forced_f0(poly)
                if f0 is not None and f0.is_zero():
                    h_now = _current_height(poly)
                    if h_now is not None:
                        cand = reduce_step(poly, f0)
                        h_next = None if cand.is_zero() else _current_height(cand)
                        if h_next is not None and h_next < h_now:
                            lowering = True
                if not lowering:
                    finish_leaf(node, prefix, depth)
                    return
        # pick branch values
        cs = poly.constant_polynomial()
        if all(c.is_zero() for c in cs):
            if path is not None and tokens:
                choices = [parse_branch_token(tokens[0], poly.fd)[0]]
                rest = tokens[1:]
                if choices[0] is None:
                    node.leaf = Leaf("Failed", pre_shift=poly,
                                     prefix=list(prefix),
                                     detail="token rho without extension")
                    state["leaves"] += 1
                    return
                _branch(node, poly, choices, prefix, depth, rest)
                return
            node.leaf = Leaf("Failed", pre_shift=poly, prefix=list(prefix),
                             detail="constant equation vanishes identically; "
                                    "supply an explicit branch value")
            state["leaves"] += 1
            return
        if path is not None:
            if not tokens:
                node.leaf = Leaf("Failed", pre_shift=poly, prefix=list(prefix),
                                 detail="branch path exhausted before reduction")
                state["leaves"] += 1
                return
            token = tokens[0]
            want_adjoin = "rho" in token
            res = solve_univariate(cs, allow_adjoin=want_adjoin)
            fdn = res.fd
            poly_l = poly if fdn == poly.fd else lift_poly(poly, fdn)
            val, _ = parse_branch_token(token, fdn)
            match = None
            for r, _mult in res.roots:
                if val is not None and r == val:
                    match = r
                    break
            if match is None:
                node.leaf = Leaf("Failed", pre_shift=poly, prefix=list(prefix),
                                 detail=f"token {token!r} is not a root here")
                state["leaves"] += 1
                return
            if fdn != poly.fd:
                prefix = [lift(c, fdn) for c in prefix]
            _branch(node, poly_l, [match], prefix, depth, tokens[1:])
            return
        res = solve_univariate(cs)
        if not res.roots:
            node.leaf = Leaf("Unresolved", pre_shift=poly, prefix=list(prefix),
                             detail="no field-representable root; try numeric "
                                    "mode or an explicit branch path")
            state["leaves"] += 1
            return
        roots = [r for r, _ in res.roots]
        if policy.branch == "first" or lowering:
            roots = roots[:1] if not lowering else [poly.fd.zero()]
        _branch(node, poly, roots, prefix, depth, None,
                rule="height-lowering" if lowering else None)
        if res.unresolved is not None and policy.branch == "all":
            un = TraceNode([], poly)
            un.leaf = Leaf("Unresolved", pre_shift=poly, prefix=list(prefix),
                           detail="unresolved constant-equation factor of "
                                  f"degree {len(res.unresolved) - 1}")
            node.children.append(un)
            state["leaves"] += 1

    def _branch(node, poly, roots, prefix, depth, tokens, rule=None):
        for f0 in roots:
            sub = poly.substitute_reduction(f0)
            payload = {"f0": f0, "fd_after": poly.fd}
            if rule:
                payload["rule"] = rule
            steps = [ReductionStep("Reduce", payload,
                                   digest(node.polynomial), digest(sub),
                                   node.polynomial.term_count(), sub.term_count())]
            if sub.is_zero():
                ch = TraceNode(steps, sub)
                ch.leaf = Leaf("Failed", pre_shift=sub,
                               prefix=list(prefix) + [f0],
                               detail="substitution annihilated the equation")
                node.children.append(ch)
                state["leaves"] += 1
                continue
            cleaned, removed = sub.remove_trivial_factors()
            if removed["z"] or removed["Y"]:
                steps.append(ReductionStep("RemoveTrivial", {"removed": removed},
                                           digest(sub), digest(cleaned),
                                           sub.term_count(), cleaned.term_count()))
            ch = TraceNode(steps, cleaned)
            node.children.append(ch)
            explore(ch, list(prefix) + [f0], depth + 1, tokens)

    explore(root, [], 0, path)
    fd_final = p0.fd
    trace = ReductionTrace(root, fd_final)
    for l in trace.leaves():
        poly = l.polynomial or l.pre_shift
        if poly is not None:
            fd_final = poly.fd
    trace.fd_final = fd_final
    return trace

"""The set Sigma_{q,theta}, admissible reflections and the solvability verdict."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .multgroup import ParamVector, evaluate_char
from .roots import (
    AffineDiagram,
    DimVector,
    affine_recognition,
    is_root,
    p_value,
    pair_simple,
    positive_roots_below,
    simple_reflection,
)

Theta = tuple[Fraction, ...]


def zero_theta(d: DimVector) -> Theta:
    return (Fraction(0),) * len(d)


def theta_dot(theta: Sequence[Fraction], gamma: DimVector) -> Fraction:
    return sum((t * x for t, x in zip(theta, gamma.entries) if x), Fraction(0))


def in_R_plus(gamma: DimVector, q: ParamVector, theta: Sequence[Fraction]) -> bool:
    return is_root(gamma) and evaluate_char(q, gamma).is_one() and theta_dot(theta, gamma) == 0


def r_plus_below(d: DimVector, q: ParamVector, theta: Sequence[Fraction]) -> list[DimVector]:
    """Elements of R^+_{q,theta} below d, lexicographically."""
    return [
        g for g in positive_roots_below(d) if theta_dot(theta, g) == 0 and evaluate_char(q, g).is_one()
    ]


# ---------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class SigmaCertificate:
    member: bool
    reason: str
    # a decomposition d = sum(parts) with p(d) <= sum p(parts), when one exists
    parts: tuple[DimVector, ...] = ()
    candidates: int = 0
    best_sum: int | None = None

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "reason": self.reason,
            "parts": [list(p.entries) for p in self.parts],
            "candidates": self.candidates,
            "best_sum_p": self.best_sum,
        }


def _precheck(d: DimVector, q: ParamVector, theta: Sequence[Fraction]) -> SigmaCertificate | None:
    if d.is_zero() or not d.is_nonnegative():
        raise ValueError("d must be a nonzero nonnegative vector")
    if not is_root(d):
        return SigmaCertificate(False, "not a positive root")
    if not evaluate_char(q, d).is_one():
        return SigmaCertificate(False, "q^d != 1")
    if theta_dot(theta, d) != 0:
        return SigmaCertificate(False, "theta.d != 0")
    return None


def _best_decomposition(d: DimVector, cands: list[DimVector]) -> tuple[int | None, tuple[DimVector, ...]]:
    """Maximum of sum p over decompositions of d into >= 2 candidate parts."""
    vecs = [c.entries for c in cands]
    ps = [p_value(c) for c in cands]

    @lru_cache(maxsize=None)
    def best(res: tuple[int, ...]) -> tuple[int, int] | None:
        # (max sum p over decompositions of res, first part index); None if impossible
        if not any(res):
            return (0, -1)
        top: tuple[int, int] | None = None
        for idx, g in enumerate(vecs):
            if all(a <= b for a, b in zip(g, res)):
                rest = best(tuple(b - a for a, b in zip(g, res)))
                if rest is not None and (top is None or rest[0] + ps[idx] > top[0]):
                    top = (rest[0] + ps[idx], idx)
        return top

    top: tuple[int, int] | None = None
    for idx, g in enumerate(vecs):
        if g == d.entries:
            continue
        if all(a <= b for a, b in zip(g, d.entries)):
            rest = best(tuple(b - a for a, b in zip(g, d.entries)))
            if rest is not None and (top is None or rest[0] + ps[idx] > top[0]):
                top = (rest[0] + ps[idx], idx)
    if top is None:
        return None, ()
    parts = [cands[top[1]]]
    res = tuple(b - a for a, b in zip(vecs[top[1]], d.entries))
    while any(res):
        _, idx = best(res)
        parts.append(cands[idx])
        res = tuple(b - a for a, b in zip(vecs[idx], res))
    best.cache_clear()
    return top[0], tuple(sorted(parts, key=lambda x: x.entries, reverse=True))


def sigma_membership(d: DimVector, q: ParamVector, theta: Sequence[Fraction] | None = None) -> SigmaCertificate:
    """Decide d in Sigma_{q,theta} by a memoized search over decompositions."""
    theta = zero_theta(d) if theta is None else tuple(theta)
    bad = _precheck(d, q, theta)
    if bad is not None:
        return bad
    cands = r_plus_below(d, q, theta)
    pd = p_value(d)
    best, parts = _best_decomposition(d, cands)
    if best is None or pd > best:
        return SigmaCertificate(True, "no decomposition reaches p(d)", (), len(cands), best)
    return SigmaCertificate(False, "decomposable", parts, len(cands), best)


def sigma_membership_naive(d: DimVector, q: ParamVector, theta: Sequence[Fraction] | None = None) -> bool:
    """Reference implementation: enumerate every multiset of parts explicitly."""
    theta = zero_theta(d) if theta is None else tuple(theta)
    if _precheck(d, q, theta) is not None:
        return False
    cands = [c for c in r_plus_below(d, q, theta)]
    pd = p_value(d)

    def walk(res: tuple[int, ...], start: int, count: int, acc: int) -> bool:
        # True if some decomposition of res (parts index >= start) makes acc reach p(d)
        if not any(res):
            return count >= 2 and acc >= pd
        for idx in range(start, len(cands)):
            g = cands[idx].entries
            if all(a <= b for a, b in zip(g, res)):
                if walk(tuple(b - a for a, b in zip(g, res)), idx, count + 1, acc + p_value(cands[idx])):
                    return True
        return False

    return not walk(d.entries, 0, 0, 0)


def sigma_decompositions(
    d: DimVector, q: ParamVector, theta: Sequence[Fraction] | None = None, limit: int | None = None
) -> list[tuple[DimVector, ...]]:
    """All decompositions of d into parts from Sigma_{q,theta} (as sorted tuples)."""
    theta = zero_theta(d) if theta is None else tuple(theta)
    cands = [c for c in r_plus_below(d, q, theta) if sigma_membership(c, q, theta).member]
    out: list[tuple[DimVector, ...]] = []

    def walk(res: tuple[int, ...], start: int, acc: list[DimVector]) -> None:
        if limit is not None and len(out) >= limit:
            return
        if not any(res):
            out.append(tuple(acc))
            return
        for idx in range(start, len(cands)):
            g = cands[idx].entries
            if all(a <= b for a, b in zip(g, res)):
                acc.append(cands[idx])
                walk(tuple(b - a for a, b in zip(g, res)), idx, acc)
                acc.pop()

    walk(d.entries, 0, [])
    return out


# ---------------------------------------------------------------------------
# admissible reflections


class InadmissibleReflection(ValueError):
    def __init__(self, vertex: int, message: str = ""):
        super().__init__(message or f"reflection at vertex {vertex} is not admissible (q_v = 1, theta_v = 0)")
        self.vertex = vertex


def is_admissible(q: ParamVector, theta: Sequence[Fraction], v: int) -> bool:
    return theta[v] != 0 or not q[v].is_one()


def reflect_q(q: ParamVector, v: int) -> ParamVector:
    """u_v(q)_w = q_v^{-(e_v, e_w)} q_w."""
    g = q.graph
    out = list(q.entries)
    out[v] = q[v].inverse()
    for w in g.neighbors[v]:
        out[w] = q[v] * q[w]
    return ParamVector(g, tuple(out))


def reflect_theta(theta: Sequence[Fraction], graph, v: int) -> Theta:
    """r_v(theta)_w = theta_w - (e_v, e_w) theta_v."""
    out = list(theta)
    out[v] = -theta[v]
    for w in graph.neighbors[v]:
        out[w] = theta[w] + theta[v]
    return tuple(out)


def admissible_reflect(
    q: ParamVector, d: DimVector, theta: Sequence[Fraction], v: int
) -> tuple[ParamVector, DimVector, Theta]:
    if not is_admissible(q, theta, v):
        raise InadmissibleReflection(v)
    return reflect_q(q, v), simple_reflection(v, d), reflect_theta(theta, d.graph, v)


def normalize_theta(
    q: ParamVector, d: DimVector, theta: Sequence[Fraction]
) -> tuple[ParamVector, DimVector, Theta, tuple[int, ...]]:
    """Make theta nonnegative on every leg vertex by admissible reflections.

    On a leg, theta_i = a_{i-1} - a_i for numbers a_0..a_nu and reflecting
    at i swaps a_{i-1} and a_i, so this is a bubble sort and terminates.
    """
    theta = tuple(Fraction(t) for t in theta)
    trail: list[int] = []
    g = d.graph
    for j in range(g.n_legs):
        verts = list(g.leg_vertices(j))
        changed = True
        while changed:
            changed = False
            for v in reversed(verts):
                if theta[v] < 0:
                    q, d, theta = admissible_reflect(q, d, theta, v)
                    trail.append(v)
                    changed = True
    return q, d, theta, tuple(trail)


def unwind(gamma: DimVector, trail: Sequence[int]) -> DimVector:
    """Map a vector from reflected coordinates back through the trail."""
    for v in reversed(trail):
        gamma = simple_reflection(v, gamma)
    return gamma


def reduce_to_fundamental(
    q: ParamVector, d: DimVector, theta: Sequence[Fraction]
) -> tuple[ParamVector, DimVector, Theta, tuple[int, ...]]:
    """Reflect at the smallest admissible vertex with (d, e_v) > 0 until none remains.

    Stops early if d becomes simple or acquires a negative entry.
    """
    trail: list[int] = []
    theta = tuple(theta)
    while d.height() > 1 and d.is_nonnegative():
        for v in range(len(d)):
            if pair_simple(d.graph, d.entries, v) > 0 and is_admissible(q, theta, v):
                break
        else:
            break
        q, d, theta = admissible_reflect(q, d, theta, v)
        trail.append(v)
    return q, d, theta, tuple(trail)


# ---------------------------------------------------------------------------
# classification


class Kind(str, enum.Enum):
    SIGMA = "Sigma"
    AFF = "Aff"
    AFF_INF = "AffInf"
    NOT_IN_CRITERION = "NotInCriterion"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    reason: str = ""
    m: int | None = None
    l: int | None = None
    delta: DimVector | None = None
    diagram: AffineDiagram | None = None
    infinity_vertex: int | None = None
    trail: tuple[int, ...] = ()
    certificate: SigmaCertificate | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        g = self.delta.graph if self.delta is not None else None
        out: dict = {"kind": self.kind.value, "reason": self.reason, "trail": list(self.trail)}
        if self.m is not None:
            out["m"] = self.m
        if self.l is not None:
            out["l"] = self.l
        if self.delta is not None:
            out["delta"] = list(self.delta.entries)
        if self.diagram is not None:
            out["diagram"] = self.diagram.name
        if self.infinity_vertex is not None and g is not None:
            out["infinity_vertex"] = g.label(self.infinity_vertex)
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out

    def summary(self) -> str:
        if self.kind is Kind.AFF:
            return f"Aff(m={self.m}, l={self.l}, {self.diagram.display})"
        if self.kind is Kind.AFF_INF:
            return f"AffInf(m={self.m}, {self.diagram.display})"
        if self.kind is Kind.NOT_IN_CRITERION:
            return f"NotInCriterion({self.reason})"
        return "Sigma"


def _match_aff_inf(q: ParamVector, d: DimVector, theta: Theta):
    g = d.graph
    for j in range(g.n_legs):
        verts = [v for v in g.leg_vertices(j) if d[v]]
        if len(verts) < 2 or d[verts[-1]] != 1:
            continue
        w = verts[-1]
        u = verts[-2]
        match = affine_recognition(d - DimVector.simple(g, w))
        if match is None or match.multiple < 2 or match.delta[u] != 1:
            continue
        if q[w].is_one() and theta[w] == 0 and evaluate_char(q, match.delta).is_one() and theta_dot(theta, match.delta) == 0:
            return w, match
    return None


def classify(d: DimVector, q: ParamVector, theta: Sequence[Fraction] | None = None) -> Classification:
    """Place d in Sigma, in one of the two exceptional shapes, or outside the criterion."""
    theta = zero_theta(d) if theta is None else tuple(Fraction(t) for t in theta)
    if d.is_zero() or not d.is_nonnegative():
        raise ValueError("d must be a nonzero nonnegative vector")
    if not evaluate_char(q, d).is_one():
        return Classification(Kind.NOT_IN_CRITERION, "q^d != 1")
    if theta_dot(theta, d) != 0:
        return Classification(Kind.NOT_IN_CRITERION, "theta.d != 0")
    q1, d1, t1, trail1 = normalize_theta(q, d, theta)
    q2, d2, t2, trail2 = reduce_to_fundamental(q1, d1, t1)
    trail = trail1 + trail2
    if not d2.is_nonnegative() or not is_root(d2):
        return Classification(Kind.NOT_IN_CRITERION, "not a positive root", trail=trail)
    cert = sigma_membership(d2, q2, t2)
    if cert.parts:
        cert = SigmaCertificate(
            cert.member, cert.reason, tuple(unwind(p, trail) for p in cert.parts), cert.candidates, cert.best_sum
        )
    if cert.member:
        return Classification(Kind.SIGMA, "member", trail=trail, certificate=cert)
    match = affine_recognition(d2)
    if match is not None and match.multiple >= 2:
        l = evaluate_char(q2, match.delta).order_of()
        if l is not None and match.multiple % l == 0:
            return Classification(
                Kind.AFF,
                "multiple of an isotropic root",
                m=match.multiple,
                l=l,
                delta=unwind(match.delta, trail),
                diagram=match.diagram,
                trail=trail,
                certificate=cert,
            )
    inf = _match_aff_inf(q2, d2, t2)
    if inf is not None:
        w, match = inf
        return Classification(
            Kind.AFF_INF,
            "flat root",
            m=match.multiple,
            l=1,
            delta=unwind(match.delta, trail),
            diagram=match.diagram,
            infinity_vertex=w,
            trail=trail,
            certificate=cert,
        )
    return Classification(Kind.NOT_IN_CRITERION, cert.reason, trail=trail, certificate=cert)


# ---------------------------------------------------------------------------
# end to end


@dataclass(frozen=True)
class Verdict:
    solvable: bool
    classification: Classification
    problem: object = field(repr=False)
    statement: str = ""

    @property
    def label(self) -> str:
        return "SOLVABLE" if self.solvable else "UNSOLVABLE"


_NO_SIMPLE = {
    Kind.AFF: "d is a multiple of an isotropic root outside Sigma: no irreducible (theta-stable) solution exists",
    Kind.AFF_INF: "d is a flat root e_inf + m*delta: no irreducible (theta-stable) solution exists",
}


def ds_verdict(classes, theta=None) -> Verdict:
    """Build the quiver data and decide whether an irreducible solution exists."""
    from .spectral import build_problem

    problem = build_problem(classes, theta)
    c = classify(problem.d, problem.q, problem.theta)
    if c.kind is Kind.SIGMA:
        statement = "d lies in Sigma: irreducible solutions exist"
    else:
        statement = _NO_SIMPLE.get(c.kind, f"d is not in Sigma ({c.reason}): no irreducible solution exists")
    return Verdict(c.kind is Kind.SIGMA, c, problem, statement)


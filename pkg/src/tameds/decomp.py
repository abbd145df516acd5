"""Minimal Sigma-decompositions and moduli-space reports."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .multgroup import ParamVector, evaluate_char
from .roots import DimVector, affine_recognition, is_connected_support, p_value, pair_simple, simple_reflection
from .sigma import (
    _match_aff_inf,
    admissible_reflect,
    is_admissible,
    sigma_membership,
    theta_dot,
    zero_theta,
)


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class DecompReport:
    d: DimVector
    parts: tuple[tuple[DimVector, int], ...]
    is_minimal: bool
    moduli_dimension: int
    notes: tuple[tuple[str, str], ...] = ()

    def flat_parts(self) -> list[DimVector]:
        return [p for p, m in self.parts for _ in range(m)]

    def factorization(self) -> str:
        factors = []
        for p, m in self.parts:
            body = f"M({p})"
            factors.append(body if m == 1 else f"Sym^{m} {body}")
        return " x ".join(factors)

    def to_dict(self) -> dict:
        return {
            "d": list(self.d.entries),
            "parts": [{"part": list(p.entries), "multiplicity": m, "p": p_value(p)} for p, m in self.parts],
            "is_minimal": self.is_minimal,
            "moduli_dimension": self.moduli_dimension,
            "factorization": self.factorization(),
            "notes": [{"tag": t, "fact": f} for t, f in self.notes],
        }


def _components(d: DimVector) -> list[DimVector]:
    g = d.graph
    supp = set(d.support())
    comps = []
    while supp:
        start = min(supp)
        stack, comp = [start], {start}
        while stack:
            v = stack.pop()
            for w in g.neighbors[v]:
                if w in supp and w not in comp:
                    comp.add(w)
                    stack.append(w)
        supp -= comp
        comps.append(DimVector(g, tuple(d[v] if v in comp else 0 for v in range(len(d)))))
    return comps


def _single_edge_split(d: DimVector, q: ParamVector, theta) -> tuple[DimVector, DimVector] | None:
    g = d.graph
    for v, w in g.edges:
        if d[v] != 1 or d[w] != 1:
            continue
        # cut the edge: the side away from the centre is a leg tail
        outer = w if g.position[w][1] > g.position[v][1] else v
        j = g.position[outer][0]
        tail = [x for x in g.leg_vertices(j) if g.position[x][1] >= g.position[outer][1]]
        part = DimVector(g, tuple(d[x] if x in tail else 0 for x in range(len(d))))
        rest = d - part
        if rest.is_zero():
            continue
        if evaluate_char(q, part).is_one() and theta_dot(theta, part) == 0:
            return part, rest
    return None


def _decompose(d: DimVector, q: ParamVector, theta: tuple[Fraction, ...], depth: int = 0) -> list[DimVector]:
    g = d.graph
    if not d.is_nonnegative():
        raise DecompositionError(f"reflection produced a negative vector {d}")
    if d.height() == 1:
        if sigma_membership(d, q, theta).member:
            return [d]
        raise DecompositionError(f"simple root {d} is not in R^+_(q,theta)")
    # (1) admissible reflection lowering d
    for v in range(len(d)):
        if pair_simple(g, d.entries, v) > 0 and is_admissible(q, theta, v):
            q1, d1, t1 = admissible_reflect(q, d, theta, v)
            return [simple_reflection(v, p) for p in _decompose(d1, q1, t1, depth + 1)]
    # (2) split off a simple root
    for v in range(len(d)):
        if pair_simple(g, d.entries, v) > 0:
            e = DimVector.simple(g, v)
            return [e] + _decompose(d - e, q, theta, depth + 1)
    # (3) disconnected support
    if not is_connected_support(g, d.entries):
        out = []
        for comp in _components(d):
            if not evaluate_char(q, comp).is_one() or theta_dot(theta, comp) != 0:
                raise DecompositionError(f"component {comp} violates q^d = 1 or theta.d = 0")
            out.extend(_decompose(comp, q, theta, depth + 1))
        return out
    # (4)
    cert = sigma_membership(d, q, theta)
    if cert.member:
        return [d]
    # (5)
    match = affine_recognition(d)
    if match is not None:
        l = evaluate_char(q, match.delta).order_of()
        if l is not None and match.multiple % l == 0 and theta_dot(theta, match.delta) == 0:
            return [match.delta * l] * (match.multiple // l)
    # (6)
    split = _single_edge_split(d, q, theta)
    if split is not None:
        a, b = split
        return _decompose(a, q, theta, depth + 1) + _decompose(b, q, theta, depth + 1)
    # (7)
    inf = _match_aff_inf(q, d, theta)
    if inf is not None:
        w, match = inf
        return [DimVector.simple(g, w)] + [match.delta] * match.multiple
    raise DecompositionError(f"no decomposition rule applies to {d}")


def minimal_decomposition(
    d: DimVector, q: ParamVector, theta: Sequence[Fraction] | None = None
) -> DecompReport:
    """Minimal decomposition of d into elements of Sigma_{q,theta}."""
    theta = zero_theta(d) if theta is None else tuple(Fraction(t) for t in theta)
    if d.is_zero() or not d.is_nonnegative():
        raise ValueError("d must be a nonzero nonnegative vector")
    if not evaluate_char(q, d).is_one():
        raise DecompositionError("q^d != 1")
    if theta_dot(theta, d) != 0:
        raise DecompositionError("theta.d != 0")
    parts = _decompose(d, q, theta)
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    if total != d:
        raise AssertionError("decomposition does not sum to d")
    for p in set(parts):
        if not sigma_membership(p, q, theta).member:
            raise DecompositionError(f"part {p} is not in Sigma")
    grouped = _group(parts)
    return DecompReport(d, grouped, True, sum(m * 2 * p_value(p) for p, m in grouped), _notes(grouped))


def _group(parts: Sequence[DimVector]) -> tuple[tuple[DimVector, int], ...]:
    counts = Counter(parts)
    return tuple(sorted(counts.items(), key=lambda t: (-t[0].height(), t[0].entries)))


def _notes(grouped) -> tuple[tuple[str, str], ...]:
    notes = [
        ("symmetric-product", "direct sum induces an isomorphism onto the product of symmetric powers of the part moduli"),
        ("normality", "the moduli space, if nonempty, is a normal variety"),
        ("dimension", "if nonempty, the moduli space has dimension sum over parts of 2p(part)"),
    ]
    if len(grouped) == 1 and grouped[0][1] == 1:
        notes.append(("irreducible-stratum", "d lies in Sigma: the stable locus is dense"))
    return tuple(notes)


def moduli_report(d: DimVector, q: ParamVector, theta: Sequence[Fraction] | None = None) -> DecompReport:
    return minimal_decomposition(d, q, theta)


def stratum_dimension(parts: Sequence[tuple[int, DimVector]]) -> int:
    if not parts:
        raise ValueError("parts must be nonempty")
    return sum(2 * p_value(p) for _, p in parts)


def refines(fine: Sequence[DimVector], coarse: Sequence[DimVector]) -> bool:
    """True if the parts of ``fine`` can be grouped so that the groups sum to the parts of ``coarse``."""
    fine = sorted(fine, key=lambda x: x.entries, reverse=True)
    targets = [list(c.entries) for c in coarse]
    if not fine:
        return all(not any(t) for t in targets)

    def place(i: int) -> bool:
        if i == len(fine):
            return all(not any(t) for t in targets)
        f = fine[i].entries
        tried = set()
        for t in targets:
            key = tuple(t)
            if key in tried:
                continue
            tried.add(key)
            if all(a <= b for a, b in zip(f, t)):
                for k, a in enumerate(f):
                    t[k] -= a
                if place(i + 1):
                    return True
                for k, a in enumerate(f):
                    t[k] += a
        return False

    return place(0)

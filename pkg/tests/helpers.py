"""Random instance builders shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction

from tameds.multgroup import MultElement, ParamVector, evaluate_char
from tameds.roots import DimVector, StarGraph, positive_roots_below
from tameds.spectral import ClassSpec

Z = MultElement.root_of_unity
ONE = MultElement()

PALETTE = [ONE, ONE, ONE, Z(2), Z(3), Z(3, 2), Z(4), Z(6), MultElement.symbol("a"), MultElement.symbol("b")]


def random_graph(rng: random.Random, max_legs: int = 4, max_len: int = 3) -> StarGraph:
    k = rng.randint(1, max_legs)
    return StarGraph.canonical(rng.randint(1, max_len) for _ in range(k))


def random_vector(rng: random.Random, graph: StarGraph, top: int = 3) -> DimVector:
    return DimVector(graph, tuple(rng.randint(0, top) for _ in range(graph.n_vertices)))


def random_q(rng: random.Random, graph: StarGraph, palette=PALETTE) -> ParamVector:
    return ParamVector(graph, tuple(rng.choice(palette) for _ in range(graph.n_vertices)))


def nth_root(x: MultElement, k: int) -> MultElement | None:
    """Some y with y^k = x, if the free part allows it."""
    if any(e % k for _, e in x.free):
        return None
    return MultElement(tuple((g, e // k) for g, e in x.free), x.order * k, x.residue)


def force_trivial(q: ParamVector, d: DimVector, rng: random.Random) -> ParamVector:
    """Adjust one vertex so that q^d = 1 when possible."""
    supp = list(d.support())
    if not supp:
        return q
    v = rng.choice(supp)
    rest = MultElement()
    for w in supp:
        if w != v:
            rest = rest * q[w] ** d[w]
    y = nth_root(rest.inverse(), d[v])
    if y is None:
        return q
    entries = list(q.entries)
    entries[v] = y
    out = ParamVector(q.graph, tuple(entries))
    assert evaluate_char(out, d).is_one()
    return out


def random_theta(rng: random.Random, d: DimVector, zero_prob: float = 0.6) -> tuple[Fraction, ...]:
    """Small integer theta, fixed at one support vertex so that theta.d = 0."""
    theta = [Fraction(0) if rng.random() < zero_prob else Fraction(rng.randint(-2, 2)) for _ in d.entries]
    supp = list(d.support())
    if supp:
        v = rng.choice(supp)
        rest = sum((theta[w] * d[w] for w in supp if w != v), Fraction(0))
        theta[v] = -rest / d[v]
    return tuple(theta)


def random_root_instance(rng: random.Random, max_height: int = 12):
    """A positive root d with sum(d) <= max_height and (q, theta) satisfying the linear conditions."""
    while True:
        g = random_graph(rng)
        bound = DimVector(g, tuple(rng.randint(1, 3) if v == 0 else rng.randint(0, 2) for v in range(g.n_vertices)))
        roots = [r for r in positive_roots_below(bound) if r.height() <= max_height]
        if roots:
            break
    d = rng.choice(roots)
    q = force_trivial(random_q(rng, g), d, rng)
    theta = random_theta(rng, d)
    return d, q, theta


def random_generic_classes(rng: random.Random, n: int, k: int, prefix: str = "s") -> list[ClassSpec]:
    """k semisimple classes in GL_n with independent symbols, subject only to the determinant relation."""
    counter = 0

    def fresh():
        nonlocal counter
        counter += 1
        return MultElement.symbol(f"{prefix}{counter}")

    while True:
        parts = []
        for _ in range(k):
            sizes, left = [], n
            while left:
                s = rng.randint(1, left)
                sizes.append(s)
                left -= s
            parts.append(sizes)
        if 1 in parts[-1]:
            break
    eig = [[fresh() for _ in sizes] for sizes in parts]
    # one multiplicity-one eigenvalue of the last class absorbs the determinant
    fix = parts[-1].index(1)
    total = MultElement()
    for j, (vals, sizes) in enumerate(zip(eig, parts)):
        for i, (x, s) in enumerate(zip(vals, sizes)):
            if not (j == k - 1 and i == fix):
                total = total * x**s
    eig[-1][fix] = total.inverse()
    return [ClassSpec.from_multiplicities(vals, sizes) for vals, sizes in zip(eig, parts)]

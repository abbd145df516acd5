"""Semisimple families on the affine star diagrams D4~, E6~, E7~, E8~.

For m >= 2 and q^delta of order l < m these are the standard examples with
no irreducible solution.
"""

from __future__ import annotations

from dataclasses import dataclass

from .multgroup import MultElement, ParamVector, almost_generic_check, evaluate_char, prod
from .roots import AFFINE_DIAGRAMS, AffineDiagram, DimVector
from .spectral import ClassSpec, ValidationError, build_problem


@dataclass(frozen=True)
class KostovFamily:
    diagram: AffineDiagram
    m: int
    l: int
    q: ParamVector
    classes: tuple[ClassSpec, ...]

    @property
    def n(self) -> int:
        return self.m * self.diagram.star

    @property
    def d(self) -> DimVector:
        return self.diagram.delta() * self.m


def get_diagram(name: str | AffineDiagram) -> AffineDiagram:
    if isinstance(name, AffineDiagram):
        return name
    try:
        return AFFINE_DIAGRAMS[name]
    except KeyError:
        raise ValueError(f"unknown diagram {name!r}; choose from {', '.join(AFFINE_DIAGRAMS)}") from None


def almost_generic_parameters(diagram: str | AffineDiagram, l: int) -> ParamVector:
    """Symbolic q with q^delta a primitive l-th root of unity and no other relations.

    Every vertex but one leg tip w gets an independent symbol; q_w is then
    fixed by q^delta = zeta_l (delta_w = 1).
    """
    dg = get_diagram(diagram)
    g = dg.graph()
    delta = dg.delta()
    w = g.vertex(g.n_legs - 1, g.legs[-1])
    assert delta[w] == 1
    entries: list[MultElement] = []
    for v in range(g.n_vertices):
        if v == w:
            entries.append(MultElement())
        elif v == 0:
            entries.append(MultElement.symbol("t0"))
        else:
            j, i = g.position[v]
            entries.append(MultElement.symbol(f"t{j + 1}_{i}"))
    rest = prod(x ** delta[v] for v, x in enumerate(entries) if v != w)
    entries[w] = MultElement.root_of_unity(l) / rest
    return ParamVector(g, tuple(entries))


def generate(diagram: str | AffineDiagram, m: int, q: ParamVector) -> KostovFamily:
    """Semisimple classes whose star data is (diagram, m*delta, q)."""
    dg = get_diagram(diagram)
    g = dg.graph()
    if q.graph != g:
        raise ValidationError("parameter vector is not on the diagram", "/q")
    if m < 1:
        raise ValidationError("m must be positive", "/m")
    for v in range(g.n_vertices):
        if q[v].is_one():
            raise ValidationError(f"q at vertex {g.label(v)} is 1", f"/q/{g.label(v)}")
    delta = dg.delta()
    if not evaluate_char(q, delta * m).is_one():
        raise ValidationError("q^(m delta) != 1", "/q")
    l = evaluate_char(q, delta).order_of()
    k = g.n_legs
    base = [MultElement.symbol(f"x{j + 1}") for j in range(k - 1)]
    base.append(q[0] / prod(base))
    classes = []
    for j in range(k):
        xi = [base[j]]
        for v in g.leg_vertices(j):
            xi.append(q[v] * xi[-1])
        values = (dg.star,) + delta.leg(j) + (0,)
        mults = [m * (values[i] - values[i + 1]) for i in range(len(xi))]
        classes.append(ClassSpec.from_multiplicities(xi, mults))
    return KostovFamily(dg, m, l, q, tuple(classes))


def family(diagram: str | AffineDiagram, m: int, l: int) -> KostovFamily:
    if l < 1 or m % l:
        raise ValidationError("l must divide m", "/l")
    return generate(diagram, m, almost_generic_parameters(diagram, l))


def class_dimension(c: ClassSpec) -> int:
    n = c.n
    return n * n - sum(x * x for x in c.multiplicities().values())


def kappa_check(fam: KostovFamily | tuple[ClassSpec, ...] | list[ClassSpec]) -> bool:
    """Sum of the class dimensions equals 2 n^2."""
    classes = fam.classes if isinstance(fam, KostovFamily) else tuple(fam)
    if not all(c.semisimple for c in classes):
        raise ValueError("kappa_check expects semisimple classes")
    n = classes[0].n
    return sum(class_dimension(c) for c in classes) == 2 * n * n


def almost_generic_family_check(fam: KostovFamily) -> bool:
    return almost_generic_check(fam.q, fam.d)


def round_trip(fam: KostovFamily) -> bool:
    p = build_problem(fam.classes)
    return p.graph == fam.diagram.graph() and p.d == fam.d and p.q == fam.q

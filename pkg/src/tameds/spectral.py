"""From conjugacy-class data to star-shaped quiver data."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .multgroup import MultElement, ParamVector, evaluate_char, prod
from .roots import DimVector, StarGraph


class ValidationError(ValueError):
    """Invalid user data; ``pointer`` is a JSON pointer to the offending item."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{self.pointer or '/'}: {msg}"


@dataclass(frozen=True)
class ClassSpec:
    """A conjugacy class closure in GL_n described by (xi_0..xi_nu, d_0..d_nu).

    d_i is the rank of (A - xi_0)...(A - xi_{i-1}); d_0 = n.
    """

    eigenvalues: tuple[MultElement, ...]
    ranks: tuple[int, ...]
    semisimple: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "eigenvalues", tuple(self.eigenvalues))
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        if not self.ranks:
            raise ValidationError("a class needs at least one eigenvalue", "/ranks")
        if len(self.eigenvalues) != len(self.ranks):
            raise ValidationError("eigenvalues and ranks differ in length", "/ranks")
        for i, r in enumerate(self.ranks):
            if r <= 0:
                raise ValidationError("ranks must be positive", f"/ranks/{i}")
            if i and r >= self.ranks[i - 1]:
                raise ValidationError("ranks must be strictly decreasing", f"/ranks/{i}")
        if self.semisimple and len(set(self.eigenvalues)) != len(self.eigenvalues):
            raise ValidationError("a semisimple class needs distinct eigenvalues", "/eigenvalues")

    @classmethod
    def from_multiplicities(
        cls, eigenvalues: Sequence[MultElement], multiplicities: Sequence[int]
    ) -> "ClassSpec":
        if len(eigenvalues) != len(multiplicities):
            raise ValidationError("eigenvalues and multiplicities differ in length", "/multiplicities")
        for i, m in enumerate(multiplicities):
            if int(m) <= 0:
                raise ValidationError("multiplicities must be positive", f"/multiplicities/{i}")
        n = sum(multiplicities)
        ranks, used = [], 0
        for m in multiplicities:
            ranks.append(n - used)
            used += m
        return cls(tuple(eigenvalues), tuple(ranks), semisimple=True)

    @property
    def n(self) -> int:
        return self.ranks[0]

    @property
    def nu(self) -> int:
        return len(self.ranks) - 1

    def increments(self) -> tuple[int, ...]:
        """d_i - d_{i+1} with d_{nu+1} = 0: the sizes of the graded pieces."""
        r = self.ranks + (0,)
        return tuple(r[i] - r[i + 1] for i in range(len(self.ranks)))

    def multiplicities(self) -> dict[MultElement, int]:
        out: dict[MultElement, int] = {}
        for x, m in zip(self.eigenvalues, self.increments()):
            out[x] = out.get(x, 0) + m
        return out

    def determinant(self) -> MultElement:
        return prod(x**m for x, m in zip(self.eigenvalues, self.increments()))

    def eigenvalue_list(self) -> list[MultElement]:
        return [x for x, m in zip(self.eigenvalues, self.increments()) for _ in range(m)]


def class_to_leg(c: ClassSpec) -> tuple[tuple[int, ...], tuple[MultElement, ...]]:
    """Leg dimension vector d_0..d_nu and parameters q_0 = xi_0, q_i = xi_i / xi_{i-1}."""
    xi = c.eigenvalues
    q = (xi[0],) + tuple(xi[i] / xi[i - 1] for i in range(1, len(xi)))
    # determinant identity; cheap and catches arithmetic regressions
    assert prod(x**d for x, d in zip(q, c.ranks)) == c.determinant()
    return c.ranks, q


def leg_to_eigenvalues(q: Sequence[MultElement]) -> tuple[MultElement, ...]:
    out = [q[0]]
    for x in q[1:]:
        out.append(x * out[-1])
    return tuple(out)


@dataclass(frozen=True)
class DSProblem:
    graph: StarGraph
    d: DimVector
    q: ParamVector
    theta: tuple[Fraction, ...]
    classes: tuple[ClassSpec, ...] = field(repr=False)
    # leg_origin[j] = index of the input class that produced leg j
    leg_origin: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return self.d[0]

    def char_is_one(self) -> bool:
        return evaluate_char(self.q, self.d).is_one()

    def theta_pairing(self) -> Fraction:
        return sum((t * x for t, x in zip(self.theta, self.d.entries)), Fraction(0))

    def user_label(self, v: int) -> str:
        """Vertex label using the input puncture numbering."""
        if v == 0:
            return "*"
        j, i = self.graph.position[v]
        return f"{self.leg_origin[j] + 1}.{i}"


def build_problem(
    classes: Sequence[ClassSpec], theta: Mapping[str, Fraction] | None = None
) -> DSProblem:
    """Assemble the star quiver, dimension vector and parameter.

    Legs are sorted by length, ties kept in input order.  Classes with a
    single eigenvalue contribute only to the central parameter.  ``theta``
    keys are labels ``*`` and ``j.i`` with j the 1-based input class number.
    """
    classes = tuple(classes)
    if not classes:
        raise ValidationError("at least one class is required", "/classes")
    n = classes[0].n
    for j, c in enumerate(classes):
        if c.n != n:
            raise ValidationError(f"class has size {c.n}, expected {n}", f"/classes/{j}")
    legs = [(c.nu, j) for j, c in enumerate(classes) if c.nu > 0]
    legs.sort()
    graph = StarGraph(tuple(nu for nu, _ in legs))
    leg_data = [class_to_leg(c) for c in classes]
    q_star = prod(q[0] for _, q in leg_data)
    d_entries = [n]
    q_entries = [q_star]
    for _, j in legs:
        dims, q = leg_data[j]
        d_entries.extend(dims[1:])
        q_entries.extend(q[1:])
    d = DimVector(graph, tuple(d_entries))
    qv = ParamVector(graph, tuple(q_entries))
    origin = tuple(j for _, j in legs)
    th = [Fraction(0)] * graph.n_vertices
    if theta:
        lookup = {"*": 0}
        for pos, j in enumerate(origin):
            for i, v in enumerate(graph.leg_vertices(pos), start=1):
                lookup[f"{j + 1}.{i}"] = v
        for key, val in theta.items():
            if key not in lookup:
                raise ValidationError(f"unknown vertex {key!r}", f"/theta/{key}")
            th[lookup[key]] = Fraction(val)
    return DSProblem(graph, d, qv, tuple(th), classes, origin)


# ---------------------------------------------------------------------------
# types, strictness, degenerations
#
# A vector over a type is a tuple of per-puncture tuples (x_{j,0}, ..., x_{j,nu_j}).

TypeVector = tuple[tuple[int, ...], ...]


def type_vector(d: DimVector) -> TypeVector:
    return tuple((d[0],) + d.leg(j) for j in range(d.graph.n_legs))


def strictness(d: TypeVector) -> tuple[bool, TypeVector]:
    star = tuple(
        tuple(leg[i] - (leg[i + 1] if i + 1 < len(leg) else 0) for i in range(len(leg))) for leg in d
    )
    return all(x >= 0 for leg in star for x in leg), star


def from_star(d_star: TypeVector) -> TypeVector:
    """Inverse of the d -> d* transform."""
    out = []
    for leg in d_star:
        acc, vals = 0, []
        for x in reversed(leg):
            acc += x
            vals.append(acc)
        out.append(tuple(reversed(vals)))
    return tuple(out)


Degeneration = tuple[tuple[int, ...], ...]


def check_degeneration(sigma: Degeneration, nu: Sequence[int]) -> None:
    if len(sigma) != len(nu):
        raise ValidationError("degeneration and type have different puncture counts", "/sigma")
    for j, (s, n_j) in enumerate(zip(sigma, nu)):
        if not s or s[0] != 0:
            raise ValidationError("a degeneration must send [j,0] to [j,0]", f"/sigma/{j}/0")
        for i in range(1, len(s)):
            if s[i] <= s[i - 1]:
                raise ValidationError("a degeneration must be increasing", f"/sigma/{j}/{i}")
        if s[-1] > n_j:
            raise ValidationError("degeneration leaves the target type", f"/sigma/{j}/{len(s) - 1}")


def degenerate_type(sigma: Degeneration, d: TypeVector) -> TypeVector:
    """Pull back d along sigma: (sigma^* d)_{j,i} = d_{j, sigma(i)}."""
    check_degeneration(sigma, [len(leg) - 1 for leg in d])
    return tuple(tuple(leg[i] for i in s) for s, leg in zip(sigma, d))


def compose_degenerations(outer: Degeneration, inner: Degeneration) -> Degeneration:
    """The map outer o inner."""
    return tuple(tuple(o[i] for i in s) for o, s in zip(outer, inner))


def char_compat(d: DimVector, q: ParamVector) -> bool:
    """Condition for the multiplicative quiver variety to be a character variety.

    Along each leg, the graded sizes d_{i} - d_{i+1} belonging to one
    eigenvalue (equal running product of the leg parameters) must not
    increase, as they do for the ranks of successive powers of A - xi.
    """
    g = d.graph
    for j in range(g.n_legs):
        dims = (d[0],) + d.leg(j) + (0,)
        ratio = MultElement()
        ratios = [ratio]
        for v in g.leg_vertices(j):
            ratio = ratio * q[v]
            ratios.append(ratio)
        last: dict[MultElement, int] = {}
        for i, r in enumerate(ratios):
            inc = dims[i] - dims[i + 1]
            if inc < 0:
                return False
            if r in last and inc > last[r]:
                return False
            last[r] = inc
    return True

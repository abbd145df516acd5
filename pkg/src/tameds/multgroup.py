"""Exact multiplicative arithmetic for eigenvalues and deformation parameters.

Elements live in the group Z^G (+) Z/N where the free generators are prime
numbers and user-declared symbols (assumed multiplicatively independent) and
the torsion part is a root of unity.  The sign -1 is the torsion element of
order 2.  Equality to 1 is decidable, which is all the solvability criterion
needs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import TYPE_CHECKING, Iterable, Sequence

if TYPE_CHECKING:
    from .roots import DimVector, StarGraph

_SYMBOL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class PreconditionError(ValueError):
    """An input violates a stated precondition (as opposed to a bad value)."""


def _gen_key(g: str) -> tuple[int, int, str]:
    # primes first, numerically; then symbols alphabetically
    if g.isdigit():
        return (0, int(g), "")
    return (1, 0, g)


@dataclass(frozen=True)
class MultElement:
    """An element  prod_g g^{e_g} * zeta_N^a  in normalized form."""

    free: tuple[tuple[str, int], ...] = ()
    order: int = 1
    residue: int = 0

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError("torsion order must be positive")
        merged: dict[str, int] = {}
        for g, e in self.free:
            merged[g] = merged.get(g, 0) + int(e)
        free = tuple(sorted(((g, e) for g, e in merged.items() if e), key=lambda t: _gen_key(t[0])))
        a = self.residue % self.order
        n = self.order
        g = math.gcd(a, n)
        if a == 0:
            n, a = 1, 0
        else:
            n, a = n // g, a // g
        object.__setattr__(self, "free", free)
        object.__setattr__(self, "order", n)
        object.__setattr__(self, "residue", a)

    # constructors -------------------------------------------------------

    @classmethod
    def one(cls) -> "MultElement":
        return cls()

    @classmethod
    def symbol(cls, name: str) -> "MultElement":
        if not _SYMBOL_RE.match(name) or name == "zeta":
            raise ValueError(f"invalid symbol name {name!r}")
        return cls(free=((name, 1),))

    @classmethod
    def root_of_unity(cls, order: int, power: int = 1) -> "MultElement":
        return cls(order=order, residue=power)

    @classmethod
    def from_rational(cls, value: int | Fraction) -> "MultElement":
        value = Fraction(value)
        if value == 0:
            raise ValueError("0 is not invertible")
        free: dict[str, int] = {}
        for part, sign in ((value.numerator, 1), (value.denominator, -1)):
            for p, e in _factor(abs(part)).items():
                free[str(p)] = free.get(str(p), 0) + sign * e
        return cls(free=tuple(free.items()), order=2 if value < 0 else 1, residue=1 if value < 0 else 0)

    # group law ----------------------------------------------------------

    def __mul__(self, other: "MultElement") -> "MultElement":
        if not isinstance(other, MultElement):
            return NotImplemented
        n = self.order * other.order // math.gcd(self.order, other.order)
        a = self.residue * (n // self.order) + other.residue * (n // other.order)
        return MultElement(free=self.free + other.free, order=n, residue=a)

    def inverse(self) -> "MultElement":
        return MultElement(free=tuple((g, -e) for g, e in self.free), order=self.order, residue=-self.residue)

    def __truediv__(self, other: "MultElement") -> "MultElement":
        return self * other.inverse()

    def __pow__(self, k: int) -> "MultElement":
        k = int(k)
        return MultElement(
            free=tuple((g, e * k) for g, e in self.free), order=self.order, residue=self.residue * k
        )

    def is_one(self) -> bool:
        return not self.free and self.order == 1

    def order_of(self) -> int | None:
        """Multiplicative order, or None when the element has infinite order."""
        return None if self.free else self.order

    @property
    def torsion_angle(self) -> Fraction:
        """The torsion part as a fraction of a full turn, in [0, 1)."""
        return Fraction(self.residue, self.order)

    def free_part(self) -> "MultElement":
        return MultElement(free=self.free)

    def symbols(self) -> set[str]:
        return {g for g, _ in self.free if not g.isdigit()}

    def __str__(self) -> str:
        factors = []
        for g, e in self.free:
            factors.append(g if e == 1 else f"{g}^{e}")
        if self.order == 2:
            factors.insert(0, "-1")
        elif self.order > 1:
            factors.append(f"zeta({self.order})" + (f"^{self.residue}" if self.residue != 1 else ""))
        return "*".join(factors) if factors else "1"

    def __repr__(self) -> str:
        return f"MultElement({str(self)!r})"


ONE = MultElement()


def _factor(n: int) -> dict[int, int]:
    if n == 1:
        return {}
    from sympy import factorint

    return {int(p): int(e) for p, e in factorint(n).items()}


def multiply(a: MultElement, b: MultElement) -> MultElement:
    return a * b


def is_one(a: MultElement) -> bool:
    return a.is_one()


def order_of(a: MultElement) -> int | None:
    return a.order_of()


def prod(elements: Iterable[MultElement]) -> MultElement:
    return reduce(lambda x, y: x * y, elements, ONE)


@dataclass(frozen=True)
class ParamVector:
    """Deformation parameter: one MultElement per vertex of a star graph."""

    graph: "StarGraph"
    entries: tuple[MultElement, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.graph.n_vertices:
            raise ValueError("parameter vector length does not match the graph")

    def __getitem__(self, v: int) -> MultElement:
        return self.entries[v]

    def to_dict(self) -> dict[str, str]:
        return {self.graph.label(v): str(x) for v, x in enumerate(self.entries)}


def evaluate_char(q: ParamVector, gamma: "DimVector") -> MultElement:
    """The character value q^gamma = prod_v q_v^{gamma_v}."""
    if q.graph != gamma.graph:
        raise ValueError("parameter and dimension vectors live on different graphs")
    return char_value(q.entries, gamma.entries)


def char_value(q: Sequence[MultElement], gamma: Sequence[int]) -> MultElement:
    return prod(x**g for x, g in zip(q, gamma) if g)


# ---------------------------------------------------------------------------
# counting solutions of q^gamma = 1 in a box


class _Lattice:
    """Integer encoding of a finite list of MultElements for fast DP."""

    def __init__(self, elements: Sequence[MultElement]):
        gens = sorted({g for x in elements for g, _ in x.free}, key=_gen_key)
        self.index = {g: i for i, g in enumerate(gens)}
        self.modulus = reduce(lambda a, b: a * b // math.gcd(a, b), (x.order for x in elements), 1)
        self.vectors = []
        for x in elements:
            vec = [0] * len(gens)
            for g, e in x.free:
                vec[self.index[g]] = e
            self.vectors.append((tuple(vec), x.residue * (self.modulus // x.order)))


def count_trivial_characters(q: Sequence[MultElement], bounds: Sequence[int]) -> int:
    """Number of integer vectors 0 <= gamma <= bounds with prod q_v^{gamma_v} = 1.

    Dynamic programming over the vertices; a generator whose last occurrence
    has been processed must have exponent zero, and partial exponents outside
    the range the remaining vertices can still cancel are pruned.
    """
    lat = _Lattice(q)
    ngen = len(lat.index)
    verts = [v for v in range(len(q)) if bounds[v] > 0]
    # vertices carrying many generators first: closes generators early
    verts.sort(key=lambda v: (-sum(1 for e in lat.vectors[v][0] if e), v))
    # remaining achievable range per generator after each stage
    lo = [[0] * ngen for _ in range(len(verts) + 1)]
    hi = [[0] * ngen for _ in range(len(verts) + 1)]
    for s in range(len(verts) - 1, -1, -1):
        vec = lat.vectors[verts[s]][0]
        b = bounds[verts[s]]
        for g in range(ngen):
            c = vec[g] * b
            lo[s][g] = lo[s + 1][g] + min(0, c)
            hi[s][g] = hi[s + 1][g] + max(0, c)
    m = lat.modulus
    states: dict[tuple[tuple[int, ...], int], int] = {((0,) * ngen, 0): 1}
    for s, v in enumerate(verts):
        vec, res = lat.vectors[v]
        nxt: dict[tuple[tuple[int, ...], int], int] = {}
        lo_s, hi_s = lo[s + 1], hi[s + 1]
        for (exps, r), cnt in states.items():
            for k in range(bounds[v] + 1):
                new = tuple(e + k * c for e, c in zip(exps, vec))
                if any(not (-hi_s[g] <= new[g] <= -lo_s[g]) for g in range(ngen)):
                    continue
                key = (new, (r + k * res) % m)
                nxt[key] = nxt.get(key, 0) + cnt
        states = nxt
    return states.get(((0,) * ngen, 0), 0)


def _strict_vectors_below(graph: "StarGraph", d: Sequence[int]) -> Iterable[tuple[int, ...]]:
    """All star vectors 0 <= gamma <= d, nonincreasing along each leg."""
    for top in range(d[0] + 1):
        per_leg = []
        for leg in range(graph.n_legs):
            chains = [()]
            for v in graph.leg_vertices(leg):
                chains = [c + (x,) for c in chains for x in range(min(d[v], c[-1] if c else top) + 1)]
            per_leg.append(chains)
        for combo in product(*per_leg):
            yield (top,) + tuple(x for chain in combo for x in chain)


def almost_generic_check(q: ParamVector, d: "DimVector", strict_only: bool = False) -> bool:
    """True iff every 0 < gamma <= d with q^gamma = 1 is a rational multiple of d.

    With strict_only the test is restricted to gamma nonincreasing along legs.
    """
    if not evaluate_char(q, d).is_one():
        raise PreconditionError("q^d != 1")
    entries = d.entries
    g = reduce(math.gcd, entries, 0)
    if g == 0:
        raise ValueError("d must be nonzero")
    base = tuple(x // g for x in entries)
    proportional = sum(1 for t in range(g + 1) if char_value(q.entries, [t * x for x in base]).is_one())
    if strict_only:
        total = sum(1 for gam in _strict_vectors_below(d.graph, entries) if char_value(q.entries, gam).is_one())
    else:
        total = count_trivial_characters(q.entries, entries)
    return total == proportional


def generic_check(classes: Sequence[Sequence[MultElement]], n: int) -> bool:
    """Genericity of a tuple of eigenvalue multisets, each of size n.

    True iff for no 0 < N < n there are N-element sub-multisets I_j with
    prod_j prod_{i in I_j} xi_{j,i} = 1.
    """
    for j, c in enumerate(classes):
        if len(c) != n:
            raise ValueError(f"class {j} has {len(c)} eigenvalues, expected {n}")
    if not prod(x for c in classes for x in c).is_one():
        raise PreconditionError("the product of all eigenvalues is not 1")
    if n <= 1 or not classes:
        return True
    # per class and per size N: the set of products of N-element sub-multisets
    tables: list[list[set[MultElement]]] = []
    for c in classes:
        counts: dict[MultElement, int] = {}
        for x in c:
            counts[x] = counts.get(x, 0) + 1
        table: list[set[MultElement]] = [set() for _ in range(n + 1)]
        table[0].add(ONE)
        for x, mult in counts.items():
            new: list[set[MultElement]] = [set() for _ in range(n + 1)]
            for size in range(n + 1):
                for y in table[size]:
                    for k in range(mult + 1):
                        if size + k <= n:
                            new[size + k].add(y * x**k)
            table = new
        tables.append(table)
    for size in range(1, n):
        partial = {ONE}
        for table in tables[:-1]:
            partial = {a * b for a in partial for b in table[size]}
        last = tables[-1][size]
        if any(a.inverse() in last for a in partial):
            return False
    return True

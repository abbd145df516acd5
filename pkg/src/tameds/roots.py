"""Root system of a star-shaped graph.

Vertex 0 is the central vertex; the remaining vertices are numbered leg by
leg, outward from the centre.  Legs are kept sorted by length so that vertex
numbering is canonical.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence


class GraphMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class StarGraph:
    """A star: central vertex plus linear legs of the given lengths.

    ``infinity_leg`` marks a leg whose outermost vertex plays the role of the
    extra vertex attached to an affine diagram; it only changes labels.
    """

    legs: tuple[int, ...]
    infinity_leg: int | None = None

    def __post_init__(self) -> None:
        legs = tuple(int(x) for x in self.legs)
        if any(x < 0 for x in legs):
            raise ValueError("leg lengths must be nonnegative")
        if legs != tuple(sorted(legs)):
            raise ValueError("legs must be sorted by length; use StarGraph.canonical")
        object.__setattr__(self, "legs", legs)
        if self.infinity_leg is not None:
            if not 0 <= self.infinity_leg < len(legs) or legs[self.infinity_leg] < 2:
                raise ValueError("the infinity vertex must sit at the end of a leg of length >= 2")

    @classmethod
    def canonical(cls, legs: Iterable[int]) -> "StarGraph":
        return cls(tuple(sorted(legs)))

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    @cached_property
    def n_vertices(self) -> int:
        return 1 + sum(self.legs)

    @cached_property
    def _offsets(self) -> tuple[int, ...]:
        out, pos = [], 1
        for nu in self.legs:
            out.append(pos)
            pos += nu
        return tuple(out)

    def vertex(self, j: int, i: int) -> int:
        """Index of the vertex at distance i >= 1 from the centre on leg j (0-based j)."""
        if i == 0:
            return 0
        if not 1 <= i <= self.legs[j]:
            raise IndexError(f"leg {j} has no vertex {i}")
        return self._offsets[j] + i - 1

    def leg_vertices(self, j: int) -> range:
        start = self._offsets[j]
        return range(start, start + self.legs[j])

    @cached_property
    def position(self) -> tuple[tuple[int, int], ...]:
        """(leg, distance) for every vertex; the centre is (-1, 0)."""
        pos = [(-1, 0)]
        for j, nu in enumerate(self.legs):
            pos.extend((j, i) for i in range(1, nu + 1))
        return tuple(pos)

    @cached_property
    def infinity_vertex(self) -> int | None:
        if self.infinity_leg is None:
            return None
        return self.vertex(self.infinity_leg, self.legs[self.infinity_leg])

    def label(self, v: int) -> str:
        if v == 0:
            return "*"
        if v == self.infinity_vertex:
            return "inf"
        j, i = self.position[v]
        return f"{j + 1}.{i}"

    @cached_property
    def _labels(self) -> dict[str, int]:
        return {self.label(v): v for v in range(self.n_vertices)}

    def index_of(self, label: str) -> int:
        try:
            return self._labels[label]
        except KeyError:
            raise KeyError(f"no vertex labelled {label!r}") from None

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        nb: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for j, nu in enumerate(self.legs):
            prev = 0
            for v in self.leg_vertices(j):
                nb[prev].append(v)
                nb[v].append(prev)
                prev = v
        return tuple(tuple(sorted(x)) for x in nb)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((v, w) for v in range(self.n_vertices) for w in self.neighbors[v] if v < w)

    def __str__(self) -> str:
        return "Star(" + ",".join(map(str, self.legs)) + (" +inf" if self.infinity_leg is not None else "") + ")"


@dataclass(frozen=True)
class DimVector:
    graph: StarGraph
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        entries = tuple(int(x) for x in self.entries)
        if len(entries) != self.graph.n_vertices:
            raise GraphMismatchError(
                f"vector has {len(entries)} entries but {self.graph} has {self.graph.n_vertices} vertices"
            )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zero(cls, graph: StarGraph) -> "DimVector":
        return cls(graph, (0,) * graph.n_vertices)

    @classmethod
    def simple(cls, graph: StarGraph, v: int) -> "DimVector":
        e = [0] * graph.n_vertices
        e[v] = 1
        return cls(graph, tuple(e))

    @classmethod
    def from_legs(cls, graph: StarGraph, star: int, legs: Sequence[Sequence[int]]) -> "DimVector":
        """Build from the central value and the per-leg values (outward)."""
        if len(legs) != graph.n_legs or any(len(a) != nu for a, nu in zip(legs, graph.legs)):
            raise GraphMismatchError("leg data does not match the graph")
        return cls(graph, (star,) + tuple(x for a in legs for x in a))

    def leg(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[v] for v in self.graph.leg_vertices(j))

    def __getitem__(self, v: int) -> int:
        return self.entries[v]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def _check(self, other: "DimVector") -> None:
        if self.graph != other.graph:
            raise GraphMismatchError("vectors live on different graphs")

    def __add__(self, other: "DimVector") -> "DimVector":
        self._check(other)
        return DimVector(self.graph, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "DimVector") -> "DimVector":
        self._check(other)
        return DimVector(self.graph, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "DimVector":
        return DimVector(self.graph, tuple(-a for a in self.entries))

    def __mul__(self, k: int) -> "DimVector":
        return DimVector(self.graph, tuple(k * a for a in self.entries))

    __rmul__ = __mul__

    def __le__(self, other: "DimVector") -> bool:
        self._check(other)
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def __lt__(self, other: "DimVector") -> bool:
        return self <= other and self != other

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_nonnegative(self) -> bool:
        return all(a >= 0 for a in self.entries)

    def height(self) -> int:
        return sum(self.entries)

    def support(self) -> tuple[int, ...]:
        return tuple(v for v, a in enumerate(self.entries) if a)

    def to_dict(self) -> dict[str, int]:
        return {self.graph.label(v): a for v, a in enumerate(self.entries)}

    def __str__(self) -> str:
        parts = [str(self.entries[0])]
        for j in range(self.graph.n_legs):
            parts.append(",".join(map(str, self.leg(j))))
        return "(" + "; ".join(p for p in parts if p) + ")"


# ---------------------------------------------------------------------------
# the form


def pair_simple(graph: StarGraph, d: Sequence[int], v: int) -> int:
    """(d, e_v) for a raw entry tuple."""
    return 2 * d[v] - sum(d[w] for w in graph.neighbors[v])


def cartan_pairing(d1: DimVector, d2: DimVector) -> int:
    d1._check(d2)
    a, b = d1.entries, d2.entries
    total = 2 * sum(x * y for x, y in zip(a, b))
    for v, w in d1.graph.edges:
        total -= a[v] * b[w] + a[w] * b[v]
    return total


def p_value(d: DimVector) -> int:
    return 1 - cartan_pairing(d, d) // 2


def simple_reflection(v: int, d: DimVector) -> DimVector:
    if not 0 <= v < d.graph.n_vertices:
        raise IndexError(f"vertex {v} not in {d.graph}")
    c = pair_simple(d.graph, d.entries, v)
    if c == 0:
        return d
    e = list(d.entries)
    e[v] -= c
    return DimVector(d.graph, tuple(e))


def is_connected_support(graph: StarGraph, d: Sequence[int]) -> bool:
    supp = [v for v, a in enumerate(d) if a]
    if not supp:
        return False
    if d[0]:
        # every supported leg vertex must be joined to the centre through the support
        for j in range(graph.n_legs):
            gap = False
            for v in graph.leg_vertices(j):
                if d[v] == 0:
                    gap = True
                elif gap:
                    return False
        return True
    # without the centre the support must be an interval on a single leg
    legs = {graph.position[v][0] for v in supp}
    if len(legs) != 1:
        return False
    return supp[-1] - supp[0] + 1 == len(supp)


def in_fundamental_region(d: DimVector) -> bool:
    return is_connected_support(d.graph, d.entries) and all(
        pair_simple(d.graph, d.entries, v) <= 0 for v in range(d.graph.n_vertices)
    )


# ---------------------------------------------------------------------------
# classification


class RootKind(str, enum.Enum):
    NOT_ROOT = "NotRoot"
    REAL = "Real"
    ISOTROPIC = "ImaginaryIsotropic"
    ANISOTROPIC = "ImaginaryAnisotropic"

    @property
    def is_root(self) -> bool:
        return self is not RootKind.NOT_ROOT


class RootClass(NamedTuple):
    kind: RootKind
    witness: tuple[int, ...]


# per-graph memo: entries -> (kind, next vertex or -1)
_MEMO: dict[StarGraph, dict[tuple[int, ...], tuple[RootKind, int]]] = {}


def _memo(graph: StarGraph) -> dict[tuple[int, ...], tuple[RootKind, int]]:
    table = _MEMO.get(graph)
    if table is None:
        table = _MEMO.setdefault(graph, {})
    return table


def _descend(graph: StarGraph, d: tuple[int, ...]) -> RootKind:
    memo = _memo(graph)
    if d in memo:
        return memo[d][0]
    path: list[tuple[tuple[int, ...], int]] = []
    cur = d
    check_conn = True
    kind: RootKind
    while True:
        if cur in memo:
            kind = memo[cur][0]
            break
        if any(a < 0 for a in cur) or (check_conn and not is_connected_support(graph, cur)):
            kind = RootKind.NOT_ROOT
            memo[cur] = (kind, -1)
            break
        if sum(cur) == 1:
            kind = RootKind.REAL
            memo[cur] = (kind, -1)
            break
        for v in range(graph.n_vertices):
            c = pair_simple(graph, cur, v)
            if c > 0:
                break
        else:
            norm = sum(a * pair_simple(graph, cur, v) for v, a in enumerate(cur))
            kind = RootKind.ISOTROPIC if norm == 0 else RootKind.ANISOTROPIC
            memo[cur] = (kind, -1)
            break
        path.append((cur, v))
        nxt = list(cur)
        nxt[v] -= c
        check_conn = nxt[v] <= 0
        cur = tuple(nxt)
    for vec, v in path:
        memo[vec] = (kind, v)
    return kind


def _witness(graph: StarGraph, d: tuple[int, ...]) -> tuple[int, ...]:
    memo = _memo(graph)
    word = []
    cur = d
    while True:
        _, v = memo[cur]
        if v < 0:
            return tuple(word)
        word.append(v)
        nxt = list(cur)
        nxt[v] -= pair_simple(graph, cur, v)
        cur = tuple(nxt)


def classify_root(d: DimVector) -> RootClass:
    """Decide whether d is a root by reflecting towards the fundamental region.

    The witness is the word of vertices reflected at, in order.
    """
    if d.is_zero():
        raise ValueError("the zero vector is not a root")
    if not d.is_nonnegative():
        raise ValueError("classify_root expects a nonnegative vector")
    kind = _descend(d.graph, d.entries)
    return RootClass(kind, _witness(d.graph, d.entries))


def is_root(d: DimVector) -> bool:
    return not d.is_zero() and d.is_nonnegative() and _descend(d.graph, d.entries).is_root


def enumerate_positive_roots_below(bound: DimVector) -> list[tuple[DimVector, RootClass]]:
    """All positive roots 0 < gamma <= bound, in lexicographic order.

    Grows roots one simple root at a time from the simple roots; every
    positive root is reachable this way through roots.
    """
    g = bound.graph
    b = bound.entries
    if not bound.is_nonnegative():
        raise ValueError("bound must be nonnegative")
    found: set[tuple[int, ...]] = set()
    seen: set[tuple[int, ...]] = set()
    queue: deque[tuple[int, ...]] = deque()
    for v in range(g.n_vertices):
        if b[v] >= 1:
            e = tuple(1 if w == v else 0 for w in range(g.n_vertices))
            seen.add(e)
            found.add(e)
            queue.append(e)
    while queue:
        gam = queue.popleft()
        for v in range(g.n_vertices):
            if gam[v] >= b[v]:
                continue
            nxt = gam[:v] + (gam[v] + 1,) + gam[v + 1 :]
            if nxt in seen:
                continue
            seen.add(nxt)
            if _descend(g, nxt).is_root:
                found.add(nxt)
                queue.append(nxt)
    return [(DimVector(g, x), RootClass(_descend(g, x), _witness(g, x))) for x in sorted(found)]


def positive_roots_below(bound: DimVector) -> list[DimVector]:
    return [r for r, _ in enumerate_positive_roots_below(bound)]


# ---------------------------------------------------------------------------
# affine diagrams


@dataclass(frozen=True)
class AffineDiagram:
    name: str
    display: str
    arms: tuple[int, ...]
    star: int
    arm_values: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.arms)

    def graph(self) -> StarGraph:
        return StarGraph(self.arms)

    def delta(self) -> DimVector:
        return DimVector.from_legs(self.graph(), self.star, self.arm_values)


AFFINE_DIAGRAMS: dict[str, AffineDiagram] = {
    "D4t": AffineDiagram("D4t", "D4~", (1, 1, 1, 1), 2, ((1,), (1,), (1,), (1,))),
    "E6t": AffineDiagram("E6t", "E6~", (2, 2, 2), 3, ((2, 1), (2, 1), (2, 1))),
    "E7t": AffineDiagram("E7t", "E7~", (1, 3, 3), 4, ((2,), (3, 2, 1), (3, 2, 1))),
    "E8t": AffineDiagram("E8t", "E8~", (1, 2, 5), 6, ((3,), (4, 2), (5, 4, 3, 2, 1))),
}

for _dg in AFFINE_DIAGRAMS.values():
    _delta = _dg.delta()
    assert all(pair_simple(_dg.graph(), _delta.entries, v) == 0 for v in range(len(_delta))), _dg.name
del _dg, _delta


class AffineMatch(NamedTuple):
    delta: DimVector
    diagram: AffineDiagram
    multiple: int


def affine_recognition(d: DimVector) -> AffineMatch | None:
    """Recognize d as a multiple of the null root of an affine star subdiagram."""
    g = d.graph
    if d.is_zero() or d[0] == 0 or not is_connected_support(g, d.entries):
        return None
    arms = []
    for j in range(g.n_legs):
        length = sum(1 for v in g.leg_vertices(j) if d[v])
        if length:
            arms.append((length, j))
    arms.sort()
    pattern = tuple(a for a, _ in arms)
    for diagram in AFFINE_DIAGRAMS.values():
        if diagram.arms != pattern:
            continue
        if d[0] % diagram.star:
            return None
        m = d[0] // diagram.star
        delta = [0] * g.n_vertices
        delta[0] = diagram.star
        # arms of equal length are interchangeable and carry equal values
        for (length, j), values in zip(arms, diagram.arm_values):
            for i, val in enumerate(values, start=1):
                delta[g.vertex(j, i)] = val
        if all(m * x == y for x, y in zip(delta, d.entries)):
            return AffineMatch(DimVector(g, tuple(delta)), diagram, m)
        return None
    return None

"""Exact bookkeeping between Betti and Dolbeault data, weights and walls.

Weights over a type are tuples of per-puncture tuples of Fractions.  The
modulus part of an eigenvalue is kept as the free part of a MultElement, so
nothing here is floating point.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import product
from typing import Iterator, Sequence

from .multgroup import MultElement
from .spectral import Degeneration, TypeVector, ValidationError, check_degeneration, strictness

WeightVector = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class BettiPiece:
    weight: Fraction
    eigenvalue: MultElement
    size: int


@dataclass(frozen=True)
class Residue:
    b: Fraction
    modulus: MultElement  # formal exp(4 pi c)
    size: int


@dataclass(frozen=True)
class DolbeaultPiece:
    alpha: Fraction
    residues: tuple[Residue, ...]

    @property
    def size(self) -> int:
        return sum(r.size for r in self.residues)


BettiDatum = tuple[tuple[BettiPiece, ...], ...]
DolbeaultDatum = tuple[tuple[DolbeaultPiece, ...], ...]


def angle_weight(xi: MultElement) -> Fraction:
    """The alpha in [0, 1) with xi = |xi| exp(-2 pi i alpha)."""
    return (-xi.torsion_angle) % 1


def betti_to_dolbeault(datum: BettiDatum) -> DolbeaultDatum:
    out = []
    for j, pieces in enumerate(datum):
        for i in range(1, len(pieces)):
            if not pieces[i - 1].weight < pieces[i].weight:
                raise ValidationError("Betti weights must increase along a puncture", f"/{j}/{i}/weight")
        groups: dict[Fraction, list[Residue]] = {}
        for p in pieces:
            if p.size <= 0:
                raise ValidationError("piece sizes must be positive", f"/{j}")
            res = Residue(-Fraction(p.weight) / 2, p.eigenvalue.free_part(), p.size)
            groups.setdefault(angle_weight(p.eigenvalue), []).append(res)
        out.append(tuple(DolbeaultPiece(a, tuple(groups[a])) for a in sorted(groups)))
    return tuple(out)


def dolbeault_to_betti(datum: DolbeaultDatum) -> BettiDatum:
    out = []
    for j, pieces in enumerate(datum):
        betti = []
        for i, p in enumerate(pieces):
            if not 0 <= p.alpha < 1:
                raise ValidationError("parabolic weights must lie in [0, 1)", f"/{j}/{i}/alpha")
            if i and not pieces[i - 1].alpha < p.alpha:
                raise ValidationError("parabolic weights must increase", f"/{j}/{i}/alpha")
            torsion = MultElement.root_of_unity(p.alpha.denominator, -p.alpha.numerator)
            for r in p.residues:
                betti.append(BettiPiece(-2 * r.b, r.modulus * torsion, r.size))
        betti.sort(key=lambda x: x.weight)
        out.append(tuple(betti))
    return tuple(out)


def dolbeault_weights(datum: DolbeaultDatum) -> WeightVector:
    return tuple(tuple(p.alpha for p in pieces) for pieces in datum)


def dolbeault_dims(datum: DolbeaultDatum) -> TypeVector:
    """Rank vector d' of the parabolic structure (d'_{j,i} = sum of sizes from i on)."""
    out = []
    for pieces in datum:
        sizes = [p.size for p in pieces]
        out.append(tuple(sum(sizes[i:]) for i in range(len(sizes))))
    return tuple(out)


# ---------------------------------------------------------------------------
# degrees and pushforward


def filtered_degree(dims: TypeVector, weights: WeightVector, bundle_degree: int | Fraction = 0) -> Fraction:
    ok, star = strictness(dims)
    if not ok:
        raise ValidationError("dimension vector must be strict", "/dims")
    total = Fraction(bundle_degree)
    for w_leg, s_leg in zip(weights, star):
        if len(w_leg) != len(s_leg):
            raise ValidationError("weights and dims have different types", "/weights")
        total += sum((Fraction(w) * s for w, s in zip(w_leg, s_leg)), Fraction(0))
    return total


def pushforward_weight(sigma: Degeneration, alpha: WeightVector, nu: Sequence[int]) -> WeightVector:
    """(sigma_* alpha)_{j,i'} = alpha_{j,i} for sigma(i) <= i' < sigma(i+1)."""
    check_degeneration(sigma, nu)
    out = []
    for s, a, n_j in zip(sigma, alpha, nu):
        if len(s) != len(a):
            raise ValidationError("weight does not match the source type", "/alpha")
        leg = []
        bounds = list(s) + [n_j + 1]
        for i in range(len(s)):
            leg.extend([Fraction(a[i])] * (bounds[i + 1] - bounds[i]))
        out.append(tuple(leg))
    return tuple(out)


# ---------------------------------------------------------------------------
# walls


@dataclass(frozen=True)
class Wall:
    e: int
    c: TypeVector

    def form(self, alpha: WeightVector) -> Fraction:
        _, star = strictness(self.c)
        return self.e + _dot(alpha, star)


def _dot(alpha: WeightVector, star: TypeVector) -> Fraction:
    return sum((Fraction(a) * s for la, ls in zip(alpha, star) for a, s in zip(la, ls) if s), Fraction(0))


def _flat(v: TypeVector) -> tuple[int, ...]:
    return tuple(x for leg in v for x in leg)


def _rank(c: TypeVector) -> int:
    ranks = {leg[0] for leg in c}
    if len(ranks) != 1:
        raise ValidationError("all punctures must share the rank c_{j,0}", "/c")
    return ranks.pop()


@lru_cache(maxsize=64)
def strict_vectors(nu: tuple[int, ...], n: int) -> tuple[tuple[TypeVector, tuple[int, ...]], ...]:
    """All strict c' over the type nu with 1 <= rank <= n, paired with flattened c'*."""
    out = []
    for r in range(1, n + 1):
        per_leg = []
        for n_j in nu:
            seqs = [(r,)]
            for _ in range(n_j):
                seqs = [s + (x,) for s in seqs for x in range(s[-1] + 1)]
            per_leg.append(seqs)
        for combo in product(*per_leg):
            c = tuple(combo)
            out.append((c, _flat(strictness(c)[1])))
    return tuple(out)


def _proportional(e1: int, c1: TypeVector, e2: int, c2: TypeVector) -> bool:
    v1 = (e1,) + _flat(c1)
    v2 = (e2,) + _flat(c2)
    # both vectors are nonzero; proportional iff all 2x2 minors vanish
    i = next(k for k, x in enumerate(v2) if x)
    return all(a * v2[i] == b * v1[i] for a, b in zip(v1, v2))


def _scaled(alpha: WeightVector, denom: int = 1) -> tuple[int, tuple[int, ...]]:
    """Common denominator L and the integer numerators of the flattened weight."""
    flat = [Fraction(x) for leg in alpha for x in leg]
    L = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in flat), denom)
    return L, tuple(int(x * L) for x in flat)


def _type_of(c: TypeVector) -> tuple[int, tuple[int, ...]]:
    ok, _ = strictness(c)
    if not ok:
        raise ValidationError("c must be strict", "/c")
    return _rank(c), tuple(len(leg) - 1 for leg in c)


def walls(e: int, c: TypeVector) -> Iterator[Wall]:
    """All (e', c') not proportional to (e, c) whose equation can hold on the weight box."""
    n, nu = _type_of(c)
    k = len(c)
    for cp, _ in strict_vectors(nu, n):
        r = cp[0][0]
        for ep in range(-k * r + 1, 1):
            if not _proportional(ep, cp, e, c):
                yield Wall(ep, cp)


def wall_count(e: int, c: TypeVector) -> int:
    n, nu = _type_of(c)
    k = len(c)
    total = 0
    for cp, _ in strict_vectors(nu, n):
        r = cp[0][0]
        total += k * r - sum(1 for ep in range(-k * r + 1, 1) if _proportional(ep, cp, e, c))
    return total


def in_weight_space(alpha: WeightVector, e: int, c: TypeVector) -> bool:
    if len(alpha) != len(c) or any(len(a) != len(x) for a, x in zip(alpha, c)):
        return False
    for leg in alpha:
        if not all(0 <= x < 1 for x in leg) or any(leg[i] > leg[i + 1] for i in range(len(leg) - 1)):
            return False
    return e + _dot(alpha, strictness(c)[1]) == 0


def _integral_relations(alpha: WeightVector, c: TypeVector) -> Iterator[tuple[int, TypeVector]]:
    """Yield (e', c') with e' + alpha.c'* = 0, c' strict of rank <= n."""
    n, nu = _type_of(c)
    L, a = _scaled(alpha)
    for cp, star in strict_vectors(nu, n):
        s = sum(x * y for x, y in zip(a, star))
        if s % L == 0:
            yield -(s // L), cp


def _require_on_hyperplane(alpha: WeightVector, e: int, c: TypeVector) -> None:
    if not in_weight_space(alpha, e, c):
        raise ValidationError("weight is not in the weight space of (e, c)", "/alpha")


def is_almost_generic(alpha: WeightVector, e: int, c: TypeVector) -> bool:
    _require_on_hyperplane(alpha, e, c)
    return all(_proportional(ep, cp, e, c) for ep, cp in _integral_relations(alpha, c))


def is_generic(alpha: WeightVector, e: int, c: TypeVector) -> bool:
    _require_on_hyperplane(alpha, e, c)
    return all(cp == c and ep == e for ep, cp in _integral_relations(alpha, c))


def is_divisible(e: int, c: TypeVector) -> bool:
    return reduce(math.gcd, _flat(strictness(c)[1]), abs(e)) > 1


def segment_meets_wall(anchor: WeightVector, alpha: WeightVector, e: int, c: TypeVector) -> Wall | None:
    """A wall met by {anchor + t (alpha - anchor) : 0 < t <= 1}, or None.

    Along the segment each wall form is affine in t, so it suffices to look
    for integers in the half-open range of alpha.c'* over t in (0, 1].
    """
    n, nu = _type_of(c)
    L0, _ = _scaled(anchor)
    L, a1 = _scaled(alpha, L0)
    _, a0 = _scaled(anchor, L)
    for cp, star in strict_vectors(nu, n):
        n0 = sum(x * y for x, y in zip(a0, star))
        n1 = sum(x * y for x, y in zip(a1, star))
        if n0 == n1:
            hits = [n0 // L] if n0 % L == 0 else []
        elif n0 < n1:
            hits = range(n0 // L + 1, n1 // L + 1)
        else:
            hits = range(-(-n1 // L), -(-n0 // L))
        for s in hits:
            if not _proportional(-s, cp, e, c):
                return Wall(-s, cp)
    return None


class WeightSearchError(ValueError):
    pass


def pick_weight(
    e: int,
    c: TypeVector,
    anchor: WeightVector,
    mode: str = "almost-generic",
    seed: int = 0,
    max_directions: int = 50,
    max_halvings: int = 40,
) -> WeightVector:
    """A weight of the requested mode reachable from the anchor without crossing a wall."""
    if mode not in ("generic", "almost-generic"):
        raise ValueError("mode must be 'generic' or 'almost-generic'")
    anchor = tuple(tuple(Fraction(x) for x in leg) for leg in anchor)
    _require_on_hyperplane(anchor, e, c)
    if mode == "generic" and is_divisible(e, c):
        raise WeightSearchError("generic weights do not exist for a divisible (e, c)")
    test = is_generic if mode == "generic" else is_almost_generic
    if test(anchor, e, c):
        return anchor
    rng = random.Random(seed)
    # coordinates per leg: a_0 and the increments a_i - a_{i-1}; tight ones may only grow
    coords = []
    for j, leg in enumerate(anchor):
        for i, x in enumerate(leg):
            base = x if i == 0 else x - leg[i - 1]
            coords.append((j, i, base == 0))
    n = _rank(c)

    def h(u: list[int]) -> Fraction:
        return sum((Fraction(x) * _coord_weight(c, j, i, n) for x, (j, i, _) in zip(u, coords)), Fraction(0))

    free = [t for t, (_, _, tight) in enumerate(coords) if not tight]
    if not free:
        raise WeightSearchError("the weight space is a single point and it lies on a wall")
    for _ in range(max_directions):
        u1 = [abs(v) if tight else v for v, (_, _, tight) in zip((rng.randint(-9, 9) for _ in coords), coords)]
        u2 = [abs(v) if tight else v for v, (_, _, tight) in zip((rng.randint(-9, 9) for _ in coords), coords)]
        if h(u1) < 0:
            u1, u2 = u2, u1
        if h(u1) <= 0:
            u1 = [x + (1 if t in free else 0) for t, x in enumerate(u1)]
            u1 = [max(x, 1) for x in u1]
        if h(u2) >= 0:
            t = rng.choice(free)
            u2 = [0] * len(coords)
            u2[t] = -1
        h1, h2 = h(u1), h(u2)
        if h1 <= 0 or h2 >= 0:
            continue
        u = [-h2 * a + h1 * b for a, b in zip(u1, u2)]
        if not any(u):
            continue
        direction = _to_alpha_direction(u, coords, anchor)
        eps = Fraction(1, 4)
        for _ in range(max_halvings):
            alpha = tuple(tuple(a + eps * d for a, d in zip(la, ld)) for la, ld in zip(anchor, direction))
            if in_weight_space(alpha, e, c) and segment_meets_wall(anchor, alpha, e, c) is None and test(alpha, e, c):
                return alpha
            eps /= 2
    raise WeightSearchError("no admissible perturbation found")


def _coord_weight(c: TypeVector, j: int, i: int, n: int) -> int:
    # d/d(coordinate) of alpha.c*: a_0 hits all of leg j (sum c* = n), increment i hits c_{j,i}
    return n if i == 0 else c[j][i]


def _to_alpha_direction(u, coords, anchor) -> WeightVector:
    out = [[Fraction(0)] * len(leg) for leg in anchor]
    for x, (j, i, _) in zip(u, coords):
        for i2 in range(i, len(anchor[j])):
            out[j][i2] += x
    return tuple(tuple(leg) for leg in out)


# ---------------------------------------------------------------------------
# indivisibility transfer


def degree_from_eigenvalues(pieces: Sequence[Sequence[tuple[MultElement, int]]]) -> int:
    """e with e + sum alpha d* = 0, alpha the angle weights of the eigenvalues."""
    s = sum((angle_weight(xi) * size for leg in pieces for xi, size in leg), Fraction(0))
    if s.denominator != 1:
        raise ValidationError("eigenvalue angles do not sum to an integer; q^d != 1", "/")
    return -s.numerator


def indivisibility_transfer(classes, d: Sequence[int], m: int, l: int) -> bool:
    """Whether (e, d) is indivisible, cross-checked against the criterion l == m.

    ``classes`` are ClassSpecs whose graded pieces give the Betti side; e is
    computed from the grouped Dolbeault weights.
    """
    datum = tuple(
        tuple(BettiPiece(Fraction(i), xi, size) for i, (xi, size) in enumerate(zip(c.eigenvalues, c.increments())))
        for c in classes
    )
    dol = betti_to_dolbeault(datum)
    s = sum((p.alpha * p.size for leg in dol for p in leg), Fraction(0))
    if s.denominator != 1:
        raise ValidationError("eigenvalue angles do not sum to an integer; q^d != 1", "/")
    e = -s.numerator
    direct = degree_from_eigenvalues([list(zip(c.eigenvalues, c.increments())) for c in classes])
    if direct != e:
        raise AssertionError("grouping changed the degree")
    indivisible = reduce(math.gcd, d, abs(e)) == 1
    if indivisible != (l == m):
        raise AssertionError(f"(e, d) indivisible={indivisible} but l={l}, m={m}")
    return indivisible

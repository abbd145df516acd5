"""Numerical search for solutions of A_1 ... A_k = Id in prescribed classes.

A found witness is evidence of existence; failing to find one proves nothing.

Each restart conjugates the class representatives at random and runs a damped
Gauss-Newton iteration on the product, moving A_j within its class by
A_j -> (I + Y) A_j (I + Y)^{-1}.  One class is held fixed: the product equation
is invariant under cyclic rotation, so a semisimple class is rotated to the
front when there is one.  The remaining gauge freedom (simultaneous
conjugation by its centralizer) is spent periodically on lowering the total
norm, which keeps the iterates well conditioned.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .multgroup import MultElement
from .spectral import ClassSpec

RESIDUAL_TOL = 1e-10
RANK_GAP = 1e-6


class OracleError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# numerical values


def bind_symbols(classes: Sequence[ClassSpec], seed: int = 0) -> dict[str, complex]:
    """Random unit-modulus values for the declared symbols, in sorted order."""
    names = sorted({s for c in classes for x in c.eigenvalues for s in x.symbols()})
    rng = np.random.default_rng([seed, 7919])
    return {s: cmath.exp(2j * math.pi * float(rng.uniform())) for s in names}


def numeric_value(x: MultElement, binding: Mapping[str, complex]) -> complex:
    val = cmath.exp(2j * math.pi * x.residue / x.order) if x.order > 1 else 1 + 0j
    for g, e in x.free:
        base = complex(int(g)) if g.isdigit() else binding[g]
        val *= base**e
    return val


def canonical_representative(c: ClassSpec, binding: Mapping[str, complex] | None = None) -> np.ndarray:
    """A matrix in the class: block triangular, built from the innermost eigenvalue out.

    If B on C^{d_1} realizes (xi_1.., d_1..), then [[B, 0], [X, xi_0]] realizes
    the full data as soon as the stacked map [B - xi_0; X] is injective; X is
    chosen on the kernel of B - xi_0.  The result is transposed to be upper
    block triangular.
    """
    binding = binding or {}
    xi = [numeric_value(x, binding) for x in c.eigenvalues]
    if c.semisimple:
        a = np.diag([v for v, s in zip(xi, c.increments()) for _ in range(s)]).astype(complex)
        _verify_ranks(a, c, xi)
        return a
    sizes = c.increments()
    nu = c.nu
    b = np.eye(c.ranks[nu], dtype=complex) * xi[nu]
    for i in range(nu - 1, -1, -1):
        d_next = c.ranks[i + 1]
        s = sizes[i]
        x = np.zeros((s, d_next), dtype=complex)
        if any(c.eigenvalues[i] == c.eigenvalues[t] for t in range(i + 1, nu + 1)):
            shifted = b - xi[i] * np.eye(d_next)
            _, sv, vh = np.linalg.svd(shifted)
            scale = max(1.0, sv[0] if len(sv) else 1.0)
            kernel = [vh[r].conj() for r in range(d_next) if r >= len(sv) or sv[r] <= RANK_GAP * scale]
            if len(kernel) > s:
                raise OracleError("class data admits no matrix (kernel larger than the graded piece)")
            for r, vec in enumerate(kernel):
                x[r] = vec.conj()
        a = np.zeros((d_next + s, d_next + s), dtype=complex)
        a[:d_next, :d_next] = b
        a[d_next:, :d_next] = x
        a[d_next:, d_next:] = xi[i] * np.eye(s)
        b = a
    a = b.T.copy()
    _verify_ranks(a, c, xi)
    return a


def _rank(m: np.ndarray, gap: float = RANK_GAP) -> int:
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > gap * max(sv[0], 1.0)))


def _verify_ranks(a: np.ndarray, c: ClassSpec, xi: Sequence[complex]) -> None:
    n = c.n
    p = np.eye(n, dtype=complex)
    for i in range(c.nu + 1):
        if _rank(p) != c.ranks[i]:
            raise OracleError(f"representative has rank {_rank(p)} at step {i}, expected {c.ranks[i]}")
        p = p @ (a - xi[i] * np.eye(n))
    if np.linalg.norm(p) > 1e-8 * max(1.0, np.linalg.norm(a)) ** (c.nu + 1):
        raise OracleError("representative does not satisfy its minimal polynomial")


def class_residual(a: np.ndarray, c: ClassSpec, binding: Mapping[str, complex]) -> float:
    """Largest singular value that should vanish in the rank profile of A."""
    xi = [numeric_value(x, binding) for x in c.eigenvalues]
    n = c.n
    p = np.eye(n, dtype=complex)
    worst = 0.0
    for i in range(c.nu + 2):
        if i == c.nu + 1:
            worst = max(worst, float(np.linalg.norm(p, 2)))
            break
        r = c.ranks[i]
        sv = np.linalg.svd(p, compute_uv=False)
        if r < n:
            worst = max(worst, float(sv[r]))
        p = p @ (a - xi[i] * np.eye(n))
    return worst


# ---------------------------------------------------------------------------
# irreducibility


def burnside_dim(matrices: Sequence[np.ndarray], tol: float = 1e-8) -> int:
    """Dimension of the unital algebra generated by the matrices."""
    if not matrices:
        raise ValueError("need at least one matrix")
    n = matrices[0].shape[0]
    gens = []
    for m in matrices:
        norm = np.linalg.norm(m)
        gens.append(m / norm if norm else m)
    basis: list[np.ndarray] = []

    def add(m: np.ndarray) -> bool:
        v = m.reshape(-1).astype(complex)
        for _ in range(2):  # re-orthogonalize once for stability
            for b in basis:
                v = v - np.vdot(b, v) * b
        norm = np.linalg.norm(v)
        if norm > tol:
            basis.append(v / norm)
            return True
        return False

    add(np.eye(n, dtype=complex))
    frontier = [np.eye(n, dtype=complex)]
    while frontier and len(basis) < n * n:
        nxt = []
        for w in frontier:
            for g in gens:
                prod = g @ w
                if add(prod):
                    nxt.append(basis[-1].reshape(n, n))
        frontier = nxt
    return len(basis)


# ---------------------------------------------------------------------------
# search


@dataclass
class SolutionWitness:
    matrices: list[np.ndarray]
    residual: float
    class_residuals: list[float]
    burnside_dim: int
    irreducible: bool
    restart: int
    binding: dict[str, complex] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "residual": self.residual,
            "class_residuals": self.class_residuals,
            "burnside_dim": self.burnside_dim,
            "irreducible": self.irreducible,
            "restart": self.restart,
            "matrices": [
                [[[float(z.real), float(z.imag)] for z in row] for row in m] for m in self.matrices
            ],
        }


def _product(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.eye(mats[0].shape[0], dtype=complex)
    for m in mats:
        out = out @ m
    return out


def _jacobian(mats: list[np.ndarray]) -> np.ndarray:
    """Derivative of vec(A_1...A_k) in the directions A_j -> A_j + [Y_j, A_j], j >= 2."""
    k = len(mats)
    n = mats[0].shape[0]
    prefix = [np.eye(n, dtype=complex)]
    for m in mats:
        prefix.append(prefix[-1] @ m)
    suffix = [np.eye(n, dtype=complex)]
    for m in reversed(mats):
        suffix.append(m @ suffix[-1])
    suffix.reverse()  # suffix[j] = A_j ... A_k (0-based), suffix[k] = I
    blocks = []
    for j in range(1, k):
        left, right = prefix[j], suffix[j + 1]
        blocks.append(np.kron(left, (mats[j] @ right).T) - np.kron(prefix[j + 1], right.T))
    return np.hstack(blocks)


def _centralizer_mask(a: np.ndarray) -> np.ndarray | None:
    """Block pattern of the centralizer of a diagonal matrix; None if a is not diagonal."""
    diag = np.diag(a)
    if np.linalg.norm(a - np.diag(diag)) > 0:
        return None
    return np.abs(diag[:, None] - diag[None, :]) < RANK_GAP


def _balance(mats: list[np.ndarray], mask: np.ndarray | None, steps: int = 20) -> list[np.ndarray]:
    """Conjugate A_2..A_k by a positive element of the centralizer of A_1 to shrink sum |A_j|^2.

    This keeps the conjugating matrices well conditioned: without it the
    iteration tends to drift along the gauge orbit towards infinity.
    """
    if mask is None:
        return mats
    for _ in range(steps):
        h = np.where(mask, sum(a @ a.conj().T - a.conj().T @ a for a in mats[1:]), 0)
        norm = np.linalg.norm(h)
        if norm < 1e-9:
            break
        w, v = np.linalg.eigh(h)
        size = sum(np.linalg.norm(a) ** 2 for a in mats)
        t = 0.25 / norm
        while t > 1e-8:
            g = (v * np.exp(-t * w)) @ v.conj().T
            g_inv = (v * np.exp(t * w)) @ v.conj().T
            trial = [mats[0]] + [g @ a @ g_inv for a in mats[1:]]
            if sum(np.linalg.norm(a) ** 2 for a in trial) < size:
                mats = trial
                break
            t /= 2
        else:
            break
    return mats


def _run(mats: list[np.ndarray], tol: float, max_iter: int = 300) -> tuple[list[np.ndarray], float]:
    n = mats[0].shape[0]
    eye = np.eye(n)
    mask = _centralizer_mask(mats[0])
    f = (_product(mats) - eye).reshape(-1)
    res = float(np.linalg.norm(f))
    lam = 1e-3
    accepted = 0
    for _ in range(max_iter):
        if res <= tol or len(mats) < 2:
            break
        jac = _jacobian(mats)
        m = jac.shape[1]
        a = np.vstack([jac, math.sqrt(lam) * np.eye(m)])
        rhs = np.concatenate([-f, np.zeros(m, dtype=complex)])
        y = np.linalg.lstsq(a, rhs, rcond=None)[0]
        trial = [mats[0]]
        ok = True
        for j in range(1, len(mats)):
            g = eye + y[(j - 1) * n * n : j * n * n].reshape(n, n)
            try:
                trial.append(g @ mats[j] @ np.linalg.inv(g))
            except np.linalg.LinAlgError:
                ok = False
                break
        if ok:
            f_new = (_product(trial) - eye).reshape(-1)
            r_new = float(np.linalg.norm(f_new))
            if math.isfinite(r_new) and r_new < res:
                mats, f, res = trial, f_new, r_new
                lam = max(lam / 5, 1e-15)
                accepted += 1
                if accepted % 5 == 0:
                    mats = _balance(mats, mask)
                    f = (_product(mats) - eye).reshape(-1)
                    res = float(np.linalg.norm(f))
                if max(np.linalg.norm(x) for x in mats) > 1e6:
                    break  # drifting to an ill-conditioned conjugate: restart
                continue
        lam *= 8
        if lam > 1e8:
            break
    return mats, res


def _random_conjugate(a: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = a.shape[0]
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, _ = np.linalg.qr(z)
    t = np.eye(n) + 0.3 * np.triu(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), 1)
    g = q @ t
    return g @ a @ np.linalg.inv(g)


def iter_witnesses(
    classes: Sequence[ClassSpec],
    restarts: int = 100,
    tol: float = RESIDUAL_TOL,
    seed: int = 0,
    binding: Mapping[str, complex] | None = None,
) -> Iterator[SolutionWitness]:
    """Every converged restart, in restart order."""
    classes = list(classes)
    if len(classes) < 2:
        raise ValueError("the search needs at least two classes")
    binding = dict(binding) if binding is not None else bind_symbols(classes, seed)
    reps = [canonical_representative(c, binding) for c in classes]
    n = classes[0].n
    # A_1...A_k = Id is invariant under cyclic rotation; hold a semisimple class fixed if there is one
    shift = next((j for j, c in enumerate(classes) if c.semisimple), 0)
    order = list(range(shift, len(classes))) + list(range(shift))
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        start = [reps[order[0]]] + [_random_conjugate(reps[j], rng) for j in order[1:]]
        rotated, res = _run(start, tol)
        mats = [None] * len(classes)
        for j, a in zip(order, rotated):
            mats[j] = a
        res = float(np.linalg.norm(_product(mats) - np.eye(n)))
        if not res <= tol:
            continue
        cres = [class_residual(a, c, binding) for a, c in zip(mats, classes)]
        if max(cres) > math.sqrt(tol):
            continue
        bd = burnside_dim(mats)
        yield SolutionWitness(mats, res, cres, bd, bd == n * n, r, binding)


def search(
    classes: Sequence[ClassSpec],
    restarts: int = 100,
    tol: float = RESIDUAL_TOL,
    seed: int = 0,
    binding: Mapping[str, complex] | None = None,
) -> SolutionWitness | None:
    """First irreducible witness; otherwise the best reducible one; otherwise None."""
    best = None
    for w in iter_witnesses(classes, restarts, tol, seed, binding):
        if w.irreducible:
            return w
        if best is None or w.residual < best.residual:
            best = w
    return best

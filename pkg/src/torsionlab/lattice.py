"""Full-rank rational lattices and the Haar probability measure on R^r / Gamma.

Conventions: a lattice is stored by its generator matrix ``Gamma`` with
generators as columns.  The fundamental domain is ``Gamma * [0,1)^r`` in
generator coordinates, so reduction is exact rational arithmetic and the
reference integration grid is separable.

Point locations stay rational throughout; floating point enters only in the
real-valued outputs (cos, exp), and float accumulation uses pairwise
summation with a fixed tree shape so results do not depend on how work is
partitioned.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

Vector = tuple[Fraction, ...]
Matrix = tuple[tuple[Fraction, ...], ...]


def pairwise_sum(values: Sequence[float]) -> float:
    """Sum floats with a fixed balanced reduction tree."""
    n = len(values)
    if n == 0:
        return 0.0
    if n == 1:
        return float(values[0])
    half = n // 2
    return pairwise_sum(values[:half]) + pairwise_sum(values[half:])


def _as_vector(values: Sequence) -> Vector:
    return tuple(Fraction(v) for v in values)


def _as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


def mat_vec(m: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in m)


def transpose(m: Matrix) -> Matrix:
    if not m:
        return ()
    return tuple(tuple(m[i][j] for i in range(len(m))) for j in range(len(m[0])))


def det(m: Matrix) -> Fraction:
    """Exact determinant by fraction-preserving Gaussian elimination."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    rows = [list(r) for r in m]
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            result = -result
        result *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            if factor:
                for c in range(col, n):
                    rows[r][c] -= factor * rows[col][c]
    return result


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    if n == 0:
        return ()
    aug = [list(m[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


@dataclass(frozen=True)
class Lattice:
    """A full-rank rational lattice; ``matrix`` holds generators as columns."""

    rank: int
    matrix: Matrix

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        if len(self.matrix) != self.rank or any(len(r) != self.rank for r in self.matrix):
            raise ValueError("generator matrix must be rank x rank")
        if det(self.matrix) == 0:
            raise ValueError("degenerate lattice")

    @classmethod
    def from_generator_rows(cls, rows: Sequence[Sequence]) -> "Lattice":
        """Build from one generator per row (the config convention)."""
        m = _as_matrix(rows)
        return cls(len(m), transpose(m))

    @property
    def generators(self) -> tuple[Vector, ...]:
        return transpose(self.matrix)

    def vec(self, coords: Sequence) -> Vector:
        """Gamma applied to generator coordinates."""
        return mat_vec(self.matrix, _as_vector(coords))


@lru_cache(maxsize=None)
def _gamma_inverse(lattice: Lattice) -> Matrix:
    return inverse(lattice.matrix)


@dataclass(frozen=True)
class SkeletonPoint:
    """A point of R^r / Gamma with generator coordinates beta in [0,1)^r."""

    lattice: Lattice
    beta: Vector
    ambient: Vector

    def __post_init__(self):
        if not all(0 <= b < 1 for b in self.beta):
            raise ValueError("beta coordinates must lie in [0,1)")


def _frac(q: Fraction) -> Fraction:
    return q - (q.numerator // q.denominator)


def reduce_mod_lattice(u: Sequence, lattice: Lattice) -> SkeletonPoint:
    """Reduce an ambient rational vector into the fundamental domain."""
    u = _as_vector(u)
    if len(u) != lattice.rank:
        raise ValueError(f"dimension mismatch: vector has {len(u)} coordinates, "
                         f"lattice rank is {lattice.rank}")
    coords = mat_vec(_gamma_inverse(lattice), u)
    beta = tuple(_frac(x) for x in coords)
    return SkeletonPoint(lattice, beta, lattice.vec(beta))


def dual_lattice(lattice: Lattice) -> Lattice:
    """The dual lattice: columns K with Gamma^T K = identity."""
    return Lattice(lattice.rank, inverse(transpose(lattice.matrix)))


def haar_integral(fn: Callable[[SkeletonPoint], object], lattice: Lattice,
                  n: int):
    """Midpoint Riemann sum of ``fn`` against the Haar probability measure.

    Uses the n^r grid of cell midpoints in generator coordinates.  For a
    function with Lipschitz constant L in beta coordinates the error is at
    most L * rank / (2n).  Returns an exact Fraction when every sampled
    value is exact, otherwise a float combined by pairwise summation.
    """
    if n < 1:
        raise ValueError("grid resolution must be >= 1")
    values = []
    for idx in itertools.product(range(n), repeat=lattice.rank):
        beta = tuple(Fraction(2 * i + 1, 2 * n) for i in idx)
        point = SkeletonPoint(lattice, beta, lattice.vec(beta))
        values.append(fn(point))
    cells = n ** lattice.rank
    if all(isinstance(v, (int, Fraction)) for v in values):
        return sum(values, Fraction(0)) / cells
    return pairwise_sum([float(v) for v in values]) / cells


def star_discrepancy_1d(points: Sequence) -> Fraction:
    """Exact star discrepancy of a rank-1 point set given in beta coordinates."""
    if len(points) == 0:
        raise ValueError("empty point set")
    xs = sorted(Fraction(p) for p in points)
    if not all(0 <= x < 1 for x in xs):
        raise ValueError("beta coordinates must lie in [0,1)")
    n = len(xs)
    best = Fraction(0)
    for i, x in enumerate(xs, start=1):
        best = max(best, abs(x - Fraction(i - 1, n)), abs(x - Fraction(i, n)))
    return best


def diaphony(points: Sequence[SkeletonPoint], lattice: Lattice, k_max: int) -> float:
    """Weighted truncated character-sum discrepancy for any rank.

    Characters are indexed by their integer coordinates z in the dual basis
    with 0 < max|z_i| <= k_max; the weight of z is prod (1 + |z_i|)^2.  The
    result is nonnegative and vanishes exactly when every truncated
    character sum does.
    """
    if len(points) == 0:
        raise ValueError("empty point set")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    for p in points:
        if p.lattice != lattice:
            raise ValueError("all points must live on the given lattice")
    n = len(points)
    total = 0.0
    for z in itertools.product(range(-k_max, k_max + 1), repeat=lattice.rank):
        if not any(z):
            continue
        angles = []
        for p in points:
            q = sum((Fraction(zi) * bi for zi, bi in zip(z, p.beta)), Fraction(0))
            angles.append(2.0 * math.pi * float(_frac(q)))
        re = pairwise_sum([math.cos(a) for a in angles]) / n
        im = pairwise_sum([math.sin(a) for a in angles]) / n
        weight = 1.0
        for zi in z:
            weight *= (1 + abs(zi)) ** 2
        total += (re * re + im * im) / weight
    return math.sqrt(total)

"""Uniformization data and enumeration of pre-torsion representatives.

The variety is described by its torus rank ``r``, the dimension ``s`` of the
good-reduction part, and ``r`` monomial lattice generators

    q_j = (zeta_N0^alpha[j][i] * t^gamma[j][i])_i ,

whose valuation vectors gamma[j] span the full-rank skeleton lattice.  The
good-reduction part enters only through its dimension: each toric
representative carries multiplicity m^(2s), and the weighted total over the
m^(2r) representatives is m^(2g) with g = r + s.

Representatives of points whose image is m-torsion are indexed by a lattice
coset vector ``c`` and an angular vector ``e``, both in [0, m)^r.  The
coordinates of the representative are

    x_i = zeta_(m*N0)^(b_i) * t^(u_i),   b_i = a_i + N0 * e_i,   u = gamma^T c / m,

where a_i is the least nonnegative residue of sum_j alpha[j][i] c_j modulo
N0.  The angular convention amounts to choosing, once and for all, the m-th
root of zeta_N0^a t^w as zeta_(m*N0)^a t^(w/m); every other root differs by
an angular unit already swept out by ``e``.  With this section x^m equals
the lattice element prod_j q_j^(c_j) exactly, and no two representatives
differ by a lattice element.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .lattice import Lattice, SkeletonPoint, dual_lattice, reduce_mod_lattice
from .scalars import CycElement, FieldElement


@dataclass(frozen=True)
class RaynaudData:
    """Validated uniformization datum with its lattice and dual attached."""

    r: int
    s: int
    angular_order: int
    alpha: tuple[tuple[int, ...], ...]
    gamma: tuple[tuple[Fraction, ...], ...]
    lattice: Lattice
    dual: Lattice

    @property
    def g(self) -> int:
        return self.r + self.s

    @classmethod
    def create(cls, r: int, s: int, angular_order: int,
               alpha: Sequence[Sequence[int]],
               gamma: Sequence[Sequence]) -> "RaynaudData":
        """Validate shapes and rank, and attach the skeleton lattice."""
        if r < 0 or s < 0:
            raise ValueError("dimensions must be nonnegative")
        if r + s < 1:
            raise ValueError("total dimension must be at least 1")
        if angular_order < 1:
            raise ValueError("angular order must be >= 1")
        alpha_rows = tuple(tuple(int(a) % angular_order for a in row) for row in alpha)
        gamma_rows = tuple(tuple(Fraction(v) for v in row) for row in gamma)
        if len(alpha_rows) != r or any(len(row) != r for row in alpha_rows):
            raise ValueError("alpha must be an r x r integer matrix")
        if len(gamma_rows) != r or any(len(row) != r for row in gamma_rows):
            raise ValueError("gamma must be an r x r rational matrix")
        lattice = Lattice.from_generator_rows(gamma_rows)  # rejects rank deficiency
        return cls(r, s, angular_order, alpha_rows, gamma_rows,
                   lattice, dual_lattice(lattice))


def validate(data: RaynaudData) -> RaynaudData:
    """Re-run the construction checks on an assembled datum."""
    return RaynaudData.create(data.r, data.s, data.angular_order,
                              data.alpha, data.gamma)


@dataclass(frozen=True)
class TorsionPoint:
    """One representative, indexed by its coset vector c and angular vector e."""

    m: int
    c: tuple[int, ...]
    e: tuple[int, ...]
    multiplicity: int
    angular: tuple[int, ...]        # exponents b_i of zeta_(m*N0)
    val_ambient: tuple[Fraction, ...]  # u = gamma^T c / m


def _class_data(data: RaynaudData, m: int, c: tuple[int, ...]):
    u = tuple(q / m for q in data.lattice.vec(c))
    a = tuple(
        sum(data.alpha[j][i] * c[j] for j in range(data.r)) % data.angular_order
        for i in range(data.r)
    )
    return u, a

def torsion_points(data: RaynaudData, m: int) -> Iterator[TorsionPoint]:
    """Stream the m^(2r) representatives, each with multiplicity m^(2s)."""
    if m < 1:
        raise ValueError("torsion order must be >= 1")
    multiplicity = m ** (2 * data.s)
    n0 = data.angular_order
    for c in itertools.product(range(m), repeat=data.r):
        u, a = _class_data(data, m, c)
        for e in itertools.product(range(m), repeat=data.r):
            b = tuple(a[i] + n0 * e[i] for i in range(data.r))
            yield TorsionPoint(m, c, e, multiplicity, b, u)


def skeleton_classes(data: RaynaudData, m: int) -> Iterator[tuple[tuple[int, ...], SkeletonPoint]]:
    """Stream the m^r valuation classes (one per coset vector c).

    Every class is shared by exactly m^r angular representatives, so any
    average of a function factoring through the valuation may be taken over
    classes alone.
    """
    if m < 1:
        raise ValueError("torsion order must be >= 1")
    for c in itertools.product(range(m), repeat=data.r):
        u, _ = _class_data(data, m, c)
        yield c, reduce_mod_lattice(u, data.lattice)


def valuation(x: TorsionPoint, data: RaynaudData) -> SkeletonPoint:
    """Image of the representative on the skeleton; independent of x.e."""
    return reduce_mod_lattice(x.val_ambient, data.lattice)


def torsion_coordinates(x: TorsionPoint, data: RaynaudData) -> tuple[FieldElement, ...]:
    """Exact monomial coordinates x_i = zeta_(m*N0)^(b_i) t^(u_i)."""
    w = x.m * data.angular_order
    return tuple(
        FieldElement.monomial(w, CycElement.root_of_unity(w, x.angular[i]), x.val_ambient[i])
        for i in range(data.r)
    )


def generator_coordinates(data: RaynaudData, j: int) -> tuple[FieldElement, ...]:
    """The j-th lattice generator as exact field elements (order N0)."""
    n0 = data.angular_order
    return tuple(
        FieldElement.monomial(n0, CycElement.root_of_unity(n0, data.alpha[j][i]),
                              data.gamma[j][i])
        for i in range(data.r)
    )

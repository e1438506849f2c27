"""Empirical measures of torsion valuations and convergence reports.

Weighted averages over the torsion representatives are normalized by
m^(2g): each of the m^(2r) toric representatives carries multiplicity
m^(2s) from the good-reduction directions, and both factors are handled as
exact rationals so they cancel identically whatever s is.

Character sums are accumulated exactly in a cyclotomic field (the angles
are rationals with denominator m) and converted to floats only at the very
end, so a vanishing sum really is 0.0.  Reference integrals for characters
are analytic (0 or 1); piecewise-linear references use the exact midpoint
rule; seminorm pullbacks integrate exp(-tropical value) numerically.
"""

from __future__ import annotations

import math
import time
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .lattice import Lattice, SkeletonPoint, haar_integral, pairwise_sum
from .scalars import CycElement
from .tropical import LaurentPoly, gauss_seminorm, point_seminorm
from .uniformization import RaynaudData, skeleton_classes, torsion_points

Profile = tuple[tuple[Fraction, Fraction], ...]


@dataclass(frozen=True)
class Character:
    """exp(2 pi i <k, .>) for the dual vector k with integer coordinates z."""

    coords: tuple[int, ...]
    part: str = "re"

    def __post_init__(self):
        if self.part not in ("re", "im"):
            raise ValueError("part must be 're' or 'im'")
        object.__setattr__(self, "coords", tuple(int(z) for z in self.coords))

    def is_trivial(self) -> bool:
        return not any(self.coords)


@dataclass(frozen=True)
class PiecewiseLinearBeta:
    """Sum of periodic piecewise-linear profiles, one per beta coordinate.

    Each profile is a breakpoint list ((position, value), ...) with the
    first position 0, the last position 1, strictly increasing positions,
    and matching first and last values (continuity across the gluing face).
    """

    profiles: tuple[Profile, ...]

    def __post_init__(self):
        normalized = []
        for profile in self.profiles:
            pts = tuple((Fraction(p), Fraction(v)) for p, v in profile)
            if len(pts) < 2:
                raise ValueError("profiles need at least two breakpoints")
            if pts[0][0] != 0 or pts[-1][0] != 1:
                raise ValueError("profiles must start at 0 and end at 1")
            if any(pts[i][0] >= pts[i + 1][0] for i in range(len(pts) - 1)):
                raise ValueError("breakpoint positions must be strictly increasing")
            if pts[0][1] != pts[-1][1]:
                raise ValueError("profile is not periodic: value(0) != value(1)")
            normalized.append(pts)
        object.__setattr__(self, "profiles", tuple(normalized))

    def lipschitz_constant(self) -> Fraction:
        best = Fraction(0)
        for pts in self.profiles:
            for (p0, v0), (p1, v1) in zip(pts, pts[1:]):
                best = max(best, abs((v1 - v0) / (p1 - p0)))
        return best


@dataclass(frozen=True)
class SeminormPullback:
    """exp(-valuation of f) at torsion points; does not factor through val."""

    poly: LaurentPoly


TestFunction = Union[Character, PiecewiseLinearBeta, SeminormPullback]


@dataclass(frozen=True)
class ConvergenceRow:
    m: int
    fn_id: str
    empirical: float
    reference: float
    abs_error: float
    wall_ms: float


def character_value(fn: Character, beta: Sequence[Fraction]) -> float:
    angle = sum((Fraction(z) * b for z, b in zip(fn.coords, beta)), Fraction(0))
    angle -= angle.numerator // angle.denominator
    value = 2.0 * math.pi * float(angle)
    return math.cos(value) if fn.part == "re" else math.sin(value)


def pwl_value(fn: PiecewiseLinearBeta, beta: Sequence[Fraction]) -> Fraction:
    if len(fn.profiles) != len(beta):
        raise ValueError("profile count does not match rank")
    total = Fraction(0)
    for pts, b in zip(fn.profiles, beta):
        positions = [p for p, _ in pts]
        i = bisect_right(positions, b) - 1
        if i == len(pts) - 1:
            total += pts[-1][1]
            continue
        (p0, v0), (p1, v1) = pts[i], pts[i + 1]
        total += v0 + (v1 - v0) * (b - p0) / (p1 - p0)
    return total


def _dual_coords(data: RaynaudData, k: Sequence) -> tuple[int, ...]:
    """Integer coordinates <k, gamma_j> of a dual-lattice vector; reject others."""
    kk = tuple(Fraction(x) for x in k)
    if len(kk) != data.r:
        raise ValueError("dimension mismatch")
    coords = []
    for j in range(data.r):
        z = sum((ki * gi for ki, gi in zip(kk, data.gamma[j])), Fraction(0))
        if z.denominator != 1:
            raise ValueError(f"not a dual-lattice vector: <k, generator {j}> = {z}")
        coords.append(int(z))
    return tuple(coords)


def _character_class_sum(data: RaynaudData, m: int,
                         coords: Sequence[int]) -> CycElement:
    """Exact sum of exp(2 pi i <z, c> / m) over the m^r valuation classes."""
    histogram = [0] * m
    for c, _ in skeleton_classes(data, m):
        histogram[sum(z * ci for z, ci in zip(coords, c)) % m] += 1
    acc = CycElement.zero(m)
    for a, count in enumerate(histogram):
        if count:
            acc = acc + CycElement.root_of_unity(m, a) * count
    return acc


def weyl_sum(data: RaynaudData, m: int, k: Sequence) -> complex:
    """Normalized character sum over the weighted torsion representatives.

    The character factors through the valuation, so the m^r angular choices
    per class and the multiplicity m^(2s) contribute an exact factor
    m^r * m^(2s) that cancels against the 1/m^(2g) normalization; the sum
    over classes is accumulated exactly before the single float conversion.
    """
    if m < 1:
        raise ValueError("torsion order must be >= 1")
    coords = _dual_coords(data, k)
    acc = _character_class_sum(data, m, coords)
    return (acc * Fraction(1, m ** data.r)).to_complex()


def empirical_mean(data: RaynaudData, m: int, fn: TestFunction) -> Fraction | float:
    """(1/m^(2g)) sum of deg(x) * f(x) over weighted representatives (deg = 1)."""
    if isinstance(fn, Character):
        scale = Fraction(m ** data.r * m ** (2 * data.s), m ** (2 * data.g))
        acc = _character_class_sum(data, m, fn.coords) * scale
        value = acc.to_complex()
        return value.real if fn.part == "re" else value.imag
    if isinstance(fn, PiecewiseLinearBeta):
        scale = Fraction(m ** data.r * m ** (2 * data.s), m ** (2 * data.g))
        total = sum((pwl_value(fn, sp.beta) for _, sp in skeleton_classes(data, m)),
                    Fraction(0))
        return total * scale
    if isinstance(fn, SeminormPullback):
        scale = Fraction(m ** (2 * data.s), m ** (2 * data.g))
        values = [math.exp(-float(point_seminorm(fn.poly, x, data)))
                  for x in torsion_points(data, m)]
        return pairwise_sum(values) * scale.numerator / scale.denominator
    raise TypeError(f"unsupported test function {fn!r}")


def canonical_integral(fn: TestFunction, lattice: Lattice,
                       grid: int = 64) -> Fraction | float:
    """Integral of the test function against the skeleton Haar measure."""
    if isinstance(fn, Character):
        return 0.0 if not fn.is_trivial() else 1.0
    if isinstance(fn, PiecewiseLinearBeta):
        return haar_integral(lambda sp: pwl_value(fn, sp.beta), lattice, grid)
    if isinstance(fn, SeminormPullback):
        return haar_integral(
            lambda sp: math.exp(-float(gauss_seminorm(fn.poly, sp.ambient))),
            lattice, grid)
    raise TypeError(f"unsupported test function {fn!r}")


def decay_exponent(rows: Sequence[ConvergenceRow]) -> float | None:
    """Least-squares slope of log(abs_error) against log(m).

    Rows with abs_error below 1e-14 are exact zeros for our purposes and
    carry no slope information, so they are excluded.
    """
    points = [(math.log(row.m), math.log(row.abs_error))
              for row in rows if row.abs_error >= 1e-14]
    if len(points) < 2:
        return None
    n = len(points)
    mean_x = sum(x for x, _ in points) / n
    mean_y = sum(y for _, y in points) / n
    var = sum((x - mean_x) ** 2 for x, _ in points)
    cov = sum((x - mean_x) * (y - mean_y) for x, y in points)
    if var == 0:
        return None
    return cov / var


def convergence_report(data: RaynaudData, fn: TestFunction, fn_id: str,
                       m_list: Sequence[int],
                       grid: int = 64) -> tuple[list[ConvergenceRow], float | None]:
    """Empirical means against the canonical integral along an ascending m list.

    The error column is computed before any float conversion whenever both
    sides are exact rationals.
    """
    if not m_list:
        raise ValueError("m_list must be nonempty")
    if any(b <= a for a, b in zip(m_list, list(m_list)[1:])):
        raise ValueError("m_list must be strictly ascending")
    reference = canonical_integral(fn, data.lattice, grid)
    rows = []
    for m in m_list:
        t0 = time.perf_counter()
        empirical = empirical_mean(data, m, fn)
        wall_ms = (time.perf_counter() - t0) * 1000.0
        error = abs(empirical - reference)
        rows.append(ConvergenceRow(m, fn_id, float(empirical), float(reference),
                                   float(error), wall_ms))
    return rows, decay_exponent(rows)

"""Finite-field verification of torsion counting on good-reduction curves.

Everything runs on the special fibre: short Weierstrass curves y^2 = x^3 +
ax + b over F_(p^k) with p >= 3, exhaustive point enumeration (fields are
capped at 10^6 elements), scalar multiplication by repeated doubling, and
direct counts of torsion on product subvarieties.  Intersection degrees for
the bound checks come from a fixed table for the supported subvariety
families inside E1 x E2, normalized for the product polarization built from
three times the origin divisor on each factor:

    diagonal: 6        graph of [n]: 3 + 3 n^2        fibers: 3

(the degree of that bundle restricted to Z is 3 deg(pr1|Z) + 3 deg(pr2|Z)).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .errors import InvariantViolation

FFElement = tuple[int, ...]
Point = Union[None, tuple[FFElement, FFElement]]  # None is the point at infinity

MAX_FIELD_SIZE = 10 ** 6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _poly_mul_mod(a: Sequence[int], b: Sequence[int], modulus: Sequence[int],
                  p: int) -> tuple[int, ...]:
    k = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] = (prod[i + j] + ai * bj) % p
    for i in range(len(prod) - 1, k - 1, -1):
        c = prod[i]
        if c:
            prod[i] = 0
            for j in range(k):
                prod[i - k + j] = (prod[i - k + j] - c * modulus[j]) % p
    out = prod[:k]
    out += [0] * (k - len(out))
    return tuple(out)


def _poly_pow_mod(base: Sequence[int], exponent: int, modulus: Sequence[int],
                  p: int) -> tuple[int, ...]:
    k = len(modulus) - 1
    result = tuple([1] + [0] * (k - 1))
    acc = tuple(base)
    while exponent:
        if exponent & 1:
            result = _poly_mul_mod(result, acc, modulus, p)
        acc = _poly_mul_mod(acc, acc, modulus, p)
        exponent >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    def degree(poly):
        for i in range(len(poly) - 1, -1, -1):
            if poly[i]:
                return i
        return -1

    a, b = list(a), list(b)
    while degree(b) >= 0:
        da, db = degree(a), degree(b)
        if da < db:
            a, b = b, a
            continue
        inv = pow(b[db], p - 2, p)
        while da >= db:
            c = (a[da] * inv) % p
            if c:
                for j in range(db + 1):
                    a[da - db + j] = (a[da - db + j] - c * b[j]) % p
            da = degree(a)
        a, b = b, a
    return a


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Irreducibility over F_p via x^(p^d) - x gcd tests for d | k, d < k."""
    k = len(modulus) - 1
    if k == 1:
        return True
    x_vec = tuple([0, 1] + [0] * (k - 2))
    frob = _poly_pow_mod(x_vec, p ** k, modulus, p)
    if frob != x_vec:
        return False
    for q in sorted(d for d in range(2, k + 1) if k % d == 0 and is_prime(d)):
        d = k // q
        power = _poly_pow_mod(x_vec, p ** d, modulus, p)
        diff = [(a - b) % p for a, b in zip(power, x_vec)]
        g = _poly_gcd(list(modulus), diff, p)
        deg_g = max((i for i, c in enumerate(g) if c), default=-1)
        if deg_g != 0:
            return False
    return True


def _find_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Deterministic search: first monic irreducible in lexicographic order."""
    for coeffs in itertools.product(range(p), repeat=k):
        modulus = tuple(coeffs) + (1,)
        if _is_irreducible(modulus, p):
            return modulus
    raise RuntimeError("no irreducible polynomial found")  # unreachable


@dataclass(frozen=True)
class FiniteField:
    """F_(p^k) with elements as coefficient tuples in the polynomial basis."""

    p: int
    k: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p) or self.p < 3:
            raise ValueError("characteristic must be a prime >= 3")
        if self.k < 1:
            raise ValueError("extension degree must be >= 1")
        if len(self.modulus) != self.k + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if not _is_irreducible(self.modulus, self.p):
            raise ValueError("modulus is not irreducible")

    @classmethod
    def create(cls, p: int, k: int, modulus: Sequence[int] | None = None) -> "FiniteField":
        if modulus is None:
            if k == 1:
                modulus = (0, 1)
            else:
                modulus = _find_irreducible(p, k)
        if modulus[-1] != 1:
            raise ValueError("modulus must be monic")
        return cls(p, k, tuple(int(c) % p for c in modulus[:-1]) + (1,))

    @property
    def size(self) -> int:
        return self.p ** self.k

    def from_int(self, n: int) -> FFElement:
        return (n % self.p,) + (0,) * (self.k - 1)

    def zero(self) -> FFElement:
        return (0,) * self.k

    def one(self) -> FFElement:
        return self.from_int(1)

    def elements(self) -> Iterator[FFElement]:
        for coeffs in itertools.product(range(self.p), repeat=self.k):
            yield tuple(coeffs)

    def add(self, a: FFElement, b: FFElement) -> FFElement:
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a: FFElement, b: FFElement) -> FFElement:
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a: FFElement) -> FFElement:
        return tuple((-x) % self.p for x in a)

    def mul(self, a: FFElement, b: FFElement) -> FFElement:
        return _poly_mul_mod(a, b, self.modulus, self.p)

    def scalar(self, n: int, a: FFElement) -> FFElement:
        return tuple((n * x) % self.p for x in a)

    def inv(self, a: FFElement) -> FFElement:
        if not any(a):
            raise ZeroDivisionError("inverse of zero")
        # a^(q-2) = a^(-1) in F_q
        return self.pow(a, self.size - 2)

    def pow(self, a: FFElement, n: int) -> FFElement:
        return _poly_pow_mod(a, n, self.modulus, self.p)

    def is_zero(self, a: FFElement) -> bool:
        return not any(a)


@dataclass(frozen=True)
class EllipticCurve:
    """y^2 = x^3 + ax + b over a finite field of characteristic >= 3."""

    field: FiniteField
    a: FFElement
    b: FFElement

    @classmethod
    def create(cls, field: FiniteField, a, b) -> "EllipticCurve":
        a = field.from_int(a) if isinstance(a, int) else tuple(a)
        b = field.from_int(b) if isinstance(b, int) else tuple(b)
        # discriminant (up to the usual -16 factor): 4a^3 + 27b^2
        a3 = field.mul(field.mul(a, a), a)
        b2 = field.mul(b, b)
        disc = field.add(field.scalar(4, a3), field.scalar(27, b2))
        if field.is_zero(disc):
            raise ValueError("zero discriminant")
        return cls(field, a, b)

    def extend(self, degree: int) -> "EllipticCurve":
        """The same curve over F_(p^degree); requires a prime base field."""
        if self.field.k != 1:
            raise ValueError("extend expects a curve over a prime field")
        big = FiniteField.create(self.field.p, degree)
        return EllipticCurve.create(big, self.a[0], self.b[0])

    def rhs(self, x: FFElement) -> FFElement:
        f = self.field
        return f.add(f.add(f.mul(f.mul(x, x), x), f.mul(self.a, x)), self.b)

    def contains(self, point: Point) -> bool:
        if point is None:
            return True
        x, y = point
        return self.field.mul(y, y) == self.rhs(x)


def curve_points(curve: EllipticCurve) -> list[Point]:
    """All rational points, point at infinity first; exhaustive sweep."""
    field = curve.field
    if field.size > MAX_FIELD_SIZE:
        raise ValueError(f"field too large ({field.size} > {MAX_FIELD_SIZE})")
    roots: dict[FFElement, list[FFElement]] = {}
    for y in field.elements():
        roots.setdefault(field.mul(y, y), []).append(y)
    points: list[Point] = [None]
    for x in field.elements():
        for y in roots.get(curve.rhs(x), ()):
            points.append((x, y))
    count = len(points)
    q = field.size
    if (count - q - 1) ** 2 > 4 * q:
        raise InvariantViolation(f"point count {count} violates the Hasse bound")
    return points


def negate(curve: EllipticCurve, point: Point) -> Point:
    if point is None:
        return None
    x, y = point
    return (x, curve.field.neg(y))


def add_points(curve: EllipticCurve, p1: Point, p2: Point) -> Point:
    f = curve.field
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2:
        if y1 != y2 or f.is_zero(y1):
            return None
        # tangent slope (3 x^2 + a) / (2 y)
        num = f.add(f.scalar(3, f.mul(x1, x1)), curve.a)
        lam = f.mul(num, f.inv(f.scalar(2, y1)))
    else:
        lam = f.mul(f.sub(y2, y1), f.inv(f.sub(x2, x1)))
    x3 = f.sub(f.sub(f.mul(lam, lam), x1), x2)
    y3 = f.sub(f.mul(lam, f.sub(x1, x3)), y1)
    return (x3, y3)


def scalar_mult(curve: EllipticCurve, n: int, point: Point) -> Point:
    if n < 0:
        return scalar_mult(curve, -n, negate(curve, point))
    result: Point = None
    acc = point
    while n:
        if n & 1:
            result = add_points(curve, result, acc)
        acc = add_points(curve, acc, acc)
        n >>= 1
    return result


def m_torsion(curve: EllipticCurve, m: int) -> list[Point]:
    """All points with [m]P = O, found by scalar multiplication over the sweep."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return [pt for pt in curve_points(curve) if scalar_mult(curve, m, pt) is None]


def trace_of_frobenius(curve: EllipticCurve) -> int:
    return curve.field.size + 1 - len(curve_points(curve))


# ---------------------------------------------------------------------------
# Subvarieties of E1 x E2 and torsion counts against the degree bound.

@dataclass(frozen=True)
class Diagonal:
    pass


@dataclass(frozen=True)
class GraphOfMultiplication:
    n: int


@dataclass(frozen=True)
class HorizontalFiber:
    """The curve E1 x {q}."""
    q: Point


@dataclass(frozen=True)
class VerticalFiber:
    """The curve {q} x E2."""
    q: Point


SubvarietyModel = Union[Diagonal, GraphOfMultiplication, HorizontalFiber, VerticalFiber]


def intersection_degree(z: SubvarietyModel) -> int:
    if isinstance(z, Diagonal):
        return 6
    if isinstance(z, GraphOfMultiplication):
        return 3 + 3 * z.n * z.n
    if isinstance(z, (HorizontalFiber, VerticalFiber)):
        return 3
    raise TypeError(f"unsupported subvariety {z!r}")


def subvariety_torsion_count(e1: EllipticCurve, e2: EllipticCurve,
                             z: SubvarietyModel, m: int) -> tuple[int, int]:
    """Count points of Z with both components m-torsion, and the m^2 * degree bound."""
    bound = m * m * intersection_degree(z)
    tors1 = set(map(_key, m_torsion(e1, m)))
    if isinstance(z, Diagonal):
        if e1 != e2:
            raise ValueError("diagonal requires identical factors")
        count = sum(1 for pt in curve_points(e1) if _key(pt) in tors1)
    elif isinstance(z, GraphOfMultiplication):
        if e1 != e2:
            raise ValueError("multiplication graph requires identical factors")
        count = sum(1 for pt in curve_points(e1)
                    if _key(pt) in tors1
                    and _key(scalar_mult(e1, z.n, pt)) in tors1)
    elif isinstance(z, HorizontalFiber):
        if not e2.contains(z.q):
            raise ValueError("fiber point is not on the second factor")
        q_torsion = scalar_mult(e2, m, z.q) is None
        count = len(tors1) if q_torsion else 0
    elif isinstance(z, VerticalFiber):
        if not e1.contains(z.q):
            raise ValueError("fiber point is not on the first factor")
        tors2 = m_torsion(e2, m)
        q_torsion = scalar_mult(e1, m, z.q) is None
        count = len(tors2) if q_torsion else 0
    else:
        raise TypeError(f"unsupported subvariety {z!r}")
    if count > bound:
        raise InvariantViolation(
            f"torsion count {count} exceeds the degree bound {bound} for {z!r} at m={m}")
    return count, bound


def _key(point: Point):
    return point if point is None else (tuple(point[0]), tuple(point[1]))


# ---------------------------------------------------------------------------
# Vanishing loci of affine functions along the torsion sweep.

CurvePoly = tuple[tuple[tuple[int, int], int], ...]  # ((deg_x, deg_y), coeff mod p)


def parse_curve_poly(text: str) -> CurvePoly:
    """Parse a polynomial in x, y with integer coefficients, e.g. ``x*y - 3``."""
    terms: dict[tuple[int, int], int] = {}
    chunk_re = re.compile(r"\s*([+-])?\s*([^+-]+)")
    pos = 0
    found = False
    while pos < len(text):
        match = chunk_re.match(text, pos)
        if match is None or not match.group(2).strip():
            raise ValueError(f"cannot parse polynomial {text!r}")
        found = True
        sign = -1 if match.group(1) == "-" else 1
        coeff, dx, dy = sign, 0, 0
        for factor in match.group(2).split("*"):
            factor = factor.strip()
            var = re.fullmatch(r"([xy])(?:\^(\d+))?", factor)
            if var is not None:
                power = int(var.group(2)) if var.group(2) else 1
                if var.group(1) == "x":
                    dx += power
                else:
                    dy += power
            elif re.fullmatch(r"\d+", factor):
                coeff *= int(factor)
            else:
                raise ValueError(f"unrecognized factor {factor!r} in {text!r}")
        key = (dx, dy)
        terms[key] = terms.get(key, 0) + coeff
        pos = match.end()
    if not found:
        raise ValueError("empty polynomial")
    return tuple(sorted((k, c) for k, c in terms.items() if c))


def format_curve_poly(poly: CurvePoly) -> str:
    if not poly:
        return "0"
    parts = []
    for (dx, dy), coeff in poly:
        factors = [str(coeff)]
        if dx:
            factors.append(f"x^{dx}" if dx > 1 else "x")
        if dy:
            factors.append(f"y^{dy}" if dy > 1 else "y")
        parts.append("*".join(factors))
    return " + ".join(parts)


def eval_curve_poly(field: FiniteField, poly: CurvePoly, point: Point) -> FFElement:
    if point is None:
        raise ValueError("affine polynomial is undefined at the point at infinity")
    x, y = point
    total = field.zero()
    for (dx, dy), coeff in poly:
        term = field.from_int(coeff)
        if dx:
            term = field.mul(term, field.pow(x, dx))
        if dy:
            term = field.mul(term, field.pow(y, dy))
        total = field.add(total, term)
    return total


def vanishing_count(curve: EllipticCurve, poly: CurvePoly,
                    m: int) -> tuple[int, int, int]:
    """(torsion points on V(h), all torsion points, all curve points on V(h)).

    The last entry bounds the first and does not depend on m, so the
    fraction decays like 1/m^2 once the field holds the full m-torsion.
    """
    field = curve.field
    affine = [pt for pt in curve_points(curve) if pt is not None]
    zero_locus = {_key(pt) for pt in affine
                  if field.is_zero(eval_curve_poly(field, poly, pt))}
    if len(zero_locus) == len(affine):
        raise ValueError("polynomial vanishes on the whole curve")
    torsion = m_torsion(curve, m)
    on_locus = sum(1 for pt in torsion if _key(pt) in zero_locus)
    return on_locus, len(torsion), len(zero_locus)


def vanishing_fraction(curve: EllipticCurve, poly: CurvePoly, m: int) -> Fraction:
    """Fraction of m-torsion points on the vanishing locus of the polynomial."""
    on_locus, total, locus_size = vanishing_count(curve, poly, m)
    fraction = Fraction(on_locus, total)
    if fraction > Fraction(locus_size, m * m):
        raise InvariantViolation("vanishing fraction exceeds its m-free numerator bound")
    return fraction


# ---------------------------------------------------------------------------
# The supersingular obstruction: no geometric p-torsion at all.

def expected_counts_trace_zero(p: int, k_max: int) -> list[int]:
    """Point counts over F_(p^k) for trace zero, via t_k = t*t_(k-1) - p*t_(k-2)."""
    traces = [2, 0]
    for _ in range(2, k_max + 1):
        traces.append(0 * traces[-1] - p * traces[-2])
    return [p ** k + 1 - traces[k] for k in range(1, k_max + 1)]


def supersingular_p_torsion_check(curve: EllipticCurve, k_max: int) -> bool:
    """True iff no point of exact order p exists over F_(p^k) for any k <= k_max.

    Requires a supersingular curve over a prime field (trace divisible by
    p); ordinary input is declined with the observed trace.  Point counts
    over each extension are cross-checked against the trace-zero recursion.
    """
    if curve.field.k != 1:
        raise ValueError("expected a curve over a prime field")
    p = curve.field.p
    trace = trace_of_frobenius(curve)
    if trace % p != 0:
        raise ValueError(f"curve is ordinary (trace {trace}); declining")
    expected = expected_counts_trace_zero(p, k_max) if trace == 0 else None
    ok = True
    for k in range(1, k_max + 1):
        ext = curve.extend(k) if k > 1 else curve
        points = curve_points(ext)
        if expected is not None and len(points) != expected[k - 1]:
            raise InvariantViolation(
                f"point count {len(points)} over F_{p}^{k} disagrees with the "
                f"trace recursion value {expected[k - 1]}")
        for pt in points:
            if pt is not None and scalar_mult(ext, p, pt) is None:
                ok = False
                break
        if not ok:
            break
    return ok

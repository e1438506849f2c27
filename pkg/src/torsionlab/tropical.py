"""Tropicalized Laurent polynomials, corner loci, and exact seminorms.

Valuations are handled additively: the tropicalization of a Laurent
polynomial f = sum_v a_v X^v is the piecewise-linear function

    u  ->  min_v ( val(a_v) + <v, u> ),

which is -log of the multiplicative seminorm at the skeleton point u.  The
corner locus is where the minimum is attained at least twice; it is the only
place where exact substitution can disagree with the skeleton value, because
residue cancellation can only raise a valuation.  No epsilon tolerances
appear anywhere in this module; every comparison is between exact rationals
(or +inf for a vanishing value).
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvariantViolation
from .scalars import CycElement, ElementSyntaxError, FieldElement, format_element, parse_element
from .uniformization import RaynaudData, TorsionPoint, skeleton_classes, torsion_points

Exponent = tuple[int, ...]


@dataclass(frozen=True)
class LaurentPoly:
    """A Laurent polynomial with exact field-element coefficients."""

    rank: int
    order: int
    terms: tuple[tuple[Exponent, FieldElement], ...]

    def __post_init__(self):
        prev = None
        for v, a in self.terms:
            if len(v) != self.rank:
                raise ValueError("exponent vector has wrong length")
            if a.order != self.order:
                raise ValueError("coefficient order mismatch")
            if a.is_zero():
                raise ValueError("stored coefficients must be nonzero")
            if prev is not None and v <= prev:
                raise ValueError("exponent vectors must be strictly ascending")
            prev = v

    @classmethod
    def from_terms(cls, rank: int, order: int,
                   terms: Iterable[tuple[Sequence[int], FieldElement]]) -> "LaurentPoly":
        acc: dict[Exponent, FieldElement] = {}
        for v, a in terms:
            key = tuple(int(x) for x in v)
            acc[key] = acc[key] + a if key in acc else a
        cleaned = tuple(sorted((v, a) for v, a in acc.items() if not a.is_zero()))
        return cls(rank, order, cleaned)

    @classmethod
    def zero(cls, rank: int, order: int) -> "LaurentPoly":
        return cls(rank, order, ())

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check_compatible(other)
        return LaurentPoly.from_terms(self.rank, self.order,
                                      list(self.terms) + list(other.terms))

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.rank, self.order, tuple((v, -a) for v, a in self.terms))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check_compatible(other)
        acc: dict[Exponent, FieldElement] = {}
        for v1, a1 in self.terms:
            for v2, a2 in other.terms:
                v = tuple(x + y for x, y in zip(v1, v2))
                prod = a1 * a2
                acc[v] = acc[v] + prod if v in acc else prod
        return LaurentPoly.from_terms(self.rank, self.order, acc.items())

    def _check_compatible(self, other: "LaurentPoly") -> None:
        if self.rank != other.rank or self.order != other.order:
            raise ValueError("rank or coefficient-order mismatch")


@dataclass(frozen=True)
class TropPoly:
    """Exponent vectors paired with the valuations of their coefficients."""

    rank: int
    terms: tuple[tuple[Exponent, Fraction], ...]


def tropicalize(f: LaurentPoly) -> TropPoly:
    return TropPoly(f.rank, tuple((v, a.valuation()) for v, a in f.terms))


def trop_eval(p: TropPoly, u: Sequence) -> tuple[Fraction, tuple[Exponent, ...]]:
    """Minimum of w_v + <v, u> together with all minimizing exponents."""
    if not p.terms:
        raise ValueError("the zero polynomial has no tropical value")
    uu = tuple(Fraction(x) for x in u)
    if len(uu) != p.rank:
        raise ValueError("dimension mismatch")
    best: Fraction | None = None
    argmin: list[Exponent] = []
    for v, w in p.terms:
        value = w + sum((Fraction(vi) * ui for vi, ui in zip(v, uu)), Fraction(0))
        if best is None or value < best:
            best = value
            argmin = [v]
        elif value == best:
            argmin.append(v)
    return best, tuple(argmin)


@dataclass(frozen=True)
class CornerArrangement:
    """The affine functionals <v - v', u> + (w_v - w_v') over support pairs.

    A point u lies on the corner locus exactly when the tropical minimum is
    attained at least twice there, equivalently when some listed functional
    vanishes at u and both of its exponents attain the minimum.
    """

    trop: TropPoly
    pairs: tuple[tuple[Exponent, Exponent], ...]

    def functional(self, pair: tuple[Exponent, Exponent], u: Sequence) -> Fraction:
        (v1, v2) = pair
        w = dict(self.trop.terms)
        uu = tuple(Fraction(x) for x in u)
        lin = sum((Fraction(a - b) * x for a, b, x in zip(v1, v2, uu)), Fraction(0))
        return lin + (w[v1] - w[v2])

    def on_locus(self, u: Sequence) -> bool:
        value, argmin = trop_eval(self.trop, u)
        return len(argmin) >= 2


def corner_arrangement(p: TropPoly) -> CornerArrangement:
    pairs = tuple(itertools.combinations([v for v, _ in p.terms], 2))
    return CornerArrangement(p, pairs)


def gauss_seminorm(f: LaurentPoly, u: Sequence) -> Fraction | float:
    """-log of the seminorm at the skeleton point u; +inf for the zero polynomial.

    Equals the tropical value: no cancellation occurs at skeleton points.
    """
    if f.is_zero():
        return math.inf
    value, _ = trop_eval(tropicalize(f), u)
    return value


def point_seminorm(f: LaurentPoly, x: TorsionPoint,
                   data: RaynaudData) -> Fraction | float:
    """Valuation of the exact substitution f(x_1, ..., x_r); +inf iff f(x) = 0.

    Always >= gauss_seminorm(f, u) at the ambient valuation u of x, since
    cancellation can only raise valuations.
    """
    if f.rank != data.r:
        raise ValueError(f"polynomial rank {f.rank} does not match torus rank {data.r}")
    w0 = x.m * data.angular_order
    w = _lcm(f.order, w0)
    step = w // w0
    acc = FieldElement.zero(w)
    for v, a in f.terms:
        ang = sum(bi * vi for bi, vi in zip(x.angular, v))
        q = sum((ui * vi for ui, vi in zip(x.val_ambient, v)), Fraction(0))
        mono = FieldElement.monomial(w, CycElement.root_of_unity(w, ang * step), q)
        acc = acc + a.to_order(w) * mono
    return acc.valuation()


def corner_hit_count(f: LaurentPoly, data: RaynaudData, m: int) -> tuple[int, int]:
    """Count representatives where exact substitution disagrees with the skeleton value.

    Returns (hits, total) with total = m^(2r).  Checks two guarantees while
    counting: the point valuation never drops below the skeleton value, and
    every disagreement sits over the corner locus.
    """
    if f.is_zero():
        raise ValueError("corner counting requires a nonzero polynomial")
    trop = tropicalize(f)
    gauss_cache: dict[tuple[int, ...], tuple[Fraction, int]] = {}
    for c, sp in skeleton_classes(data, m):
        value, argmin = trop_eval(trop, sp.ambient)
        gauss_cache[c] = (value, len(argmin))
    hits = 0
    for x in torsion_points(data, m):
        gauss, n_argmin = gauss_cache[x.c]
        pv = point_seminorm(f, x, data)
        if pv < gauss:
            raise InvariantViolation(
                f"point valuation {pv} below skeleton value {gauss} at {x.c}, {x.e}")
        if pv != gauss:
            if n_argmin < 2:
                raise InvariantViolation(
                    f"seminorm disagreement off the corner locus at {x.c}, {x.e}")
            hits += 1
    return hits, m ** (2 * data.r)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


# ---------------------------------------------------------------------------
# Polynomial config syntax:
#
#   poly   := term (('+' | '-') term)*
#   term   := factor ('*' factor)*
#   factor := '(' element ')' | NUMBER | 'X' [index] ['^' sint]
#
# Coefficients use the element grammar from ``scalars``; a bare variable
# 'X' is accepted for rank 1 and means 'X1'.

_VAR_RE = re.compile(r"^X(\d*)(?:\^(-?\d+))?$")


class PolySyntaxError(ValueError):
    def __init__(self, message: str, column: int):
        self.column = column
        super().__init__(f"{message} at column {column + 1}")


def _split_depth0(text: str, separators: str) -> list[tuple[str, str, int]]:
    """Split at depth-0 separator characters; returns (sign, chunk, column).

    For the additive split, separator characters in front of a chunk fold
    into its sign, so leading minuses and sequences like ``a - +b`` parse.
    """
    parts: list[tuple[str, str, int]] = []
    depth = 0
    current: list[str] = []
    sep = "+"
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise PolySyntaxError("unbalanced parenthesis", i)
        if depth == 0 and ch in separators:
            chunk = "".join(current).strip()
            if chunk:
                parts.append((sep, chunk, start))
                sep = "+"
            elif ch == "*":
                raise PolySyntaxError("empty factor", i)
            if ch == "-":
                sep = "-" if sep == "+" else "+"
            current = []
            start = i + 1
            continue
        current.append(ch)
    if depth != 0:
        raise PolySyntaxError("unbalanced parenthesis", len(text) - 1)
    chunk = "".join(current).strip()
    if chunk:
        parts.append((sep, chunk, start))
    elif parts or sep == "-":
        raise PolySyntaxError("dangling separator", len(text) - 1)
    return parts


def parse_laurent_poly(text: str, rank: int, order: int) -> LaurentPoly:
    """Parse the polynomial config syntax into a LaurentPoly."""
    terms: list[tuple[Exponent, FieldElement]] = []
    chunks = _split_depth0(text, "+-")
    if not chunks:
        raise PolySyntaxError("empty polynomial", 0)
    for sep, chunk, col in chunks:
        coeff = FieldElement.one(order)
        if sep == "-":
            coeff = -coeff
        exps = [0] * rank
        for _, factor, fcol in _split_depth0(chunk, "*"):
            factor = factor.strip()
            if factor.startswith("("):
                if not factor.endswith(")"):
                    raise PolySyntaxError("unbalanced parenthesis", col + fcol)
                try:
                    coeff = coeff * parse_element(factor[1:-1], order)
                except ElementSyntaxError as exc:
                    raise PolySyntaxError(str(exc), col + fcol) from exc
                continue
            var = _VAR_RE.match(factor)
            if var is not None:
                idx_text, pow_text = var.groups()
                if idx_text == "":
                    if rank != 1:
                        raise PolySyntaxError(
                            "bare X needs an index for rank >= 2", col + fcol)
                    idx = 1
                else:
                    idx = int(idx_text)
                if not 1 <= idx <= rank:
                    raise PolySyntaxError(
                        f"variable X{idx} out of range for rank {rank}", col + fcol)
                exps[idx - 1] += int(pow_text) if pow_text else 1
                continue
            if re.fullmatch(r"\d+(?:/\d+)?", factor):
                coeff = coeff * Fraction(factor)
                continue
            raise PolySyntaxError(f"unrecognized factor {factor!r}", col + fcol)
        terms.append((tuple(exps), coeff))
    return LaurentPoly.from_terms(rank, order, terms)


def format_laurent_poly(f: LaurentPoly) -> str:
    """Canonical printer; round-trips through ``parse_laurent_poly``."""
    if f.is_zero():
        return "(0)"
    parts = []
    for v, a in f.terms:
        factors = [f"({format_element(a)})"]
        for i, e in enumerate(v):
            if e:
                factors.append(f"X{i + 1}^{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)

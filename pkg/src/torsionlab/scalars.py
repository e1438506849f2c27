"""Exact arithmetic for cyclotomic rationals and finite valued monomial sums.

The coefficient domain is Q(zeta_N), stored in the power basis
{zeta_N^i : 0 <= i < phi(N)} after reduction modulo the N-th cyclotomic
polynomial.  Zero testing is exact because the basis is a Q-basis.

On top of it, ``FieldElement`` models an element of an algebraically closed
valued field as a finite sum of terms ``c * t^q`` with ``c`` a nonzero
cyclotomic rational and ``q`` an exact rational exponent.  The valuation of
a nonzero element is its smallest exponent, the zero element has valuation
+infinity, and the absolute value is exp(-valuation).

Everything here is exact.  Floats appear only in ``to_complex``, the final
numeric evaluation used by reporting code.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Union

Rational = Union[int, Fraction]


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("euler_phi requires n >= 1")
    result = n
    d = 2
    m = n
    while d * d <= m:
        if m % d == 0:
            while m % d == 0:
                m //= d
            result -= result // d
        d += 1
    if m > 1:
        result -= result // m
    return result


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _poly_div_exact(num: list[int], den: tuple[int, ...]) -> list[int]:
    """Divide integer polynomials exactly (monic divisor, zero remainder)."""
    num = list(num)
    dd = len(den) - 1
    assert den[-1] == 1
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        q = num[i]
        out[i - dd] = q
        if q:
            for j in range(dd + 1):
                num[i - dd + j] -= q * den[j]
    assert all(c == 0 for c in num), "non-exact polynomial division"
    return out


@lru_cache(maxsize=None)
def _cyclotomic_int(n: int) -> tuple[int, ...]:
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in _divisors(n):
        if d < n:
            poly = _poly_div_exact(poly, _cyclotomic_int(d))
    assert len(poly) == euler_phi(n) + 1
    return tuple(poly)


def cyclotomic_poly(n: int) -> tuple[Fraction, ...]:
    """Coefficients of the monic n-th cyclotomic polynomial, ascending degree."""
    if n < 1:
        raise ValueError("cyclotomic order must be >= 1")
    return tuple(Fraction(c) for c in _cyclotomic_int(n))


@lru_cache(maxsize=None)
def _power_basis_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row j is the reduction of x^j modulo the n-th cyclotomic polynomial.

    Rows exist for 0 <= j < n; all entries are integers because the
    cyclotomic polynomial is monic with integer coefficients.
    """
    phi = _cyclotomic_int(n)
    d = len(phi) - 1
    rows: list[tuple[int, ...]] = []
    for j in range(d):
        row = [0] * d
        row[j] = 1
        rows.append(tuple(row))
    for j in range(d, n):
        prev = rows[j - 1]
        shifted = [0] + list(prev[: d - 1])
        top = prev[d - 1]
        if top:
            for i in range(d):
                shifted[i] -= top * phi[i]
        rows.append(tuple(shifted))
    return tuple(rows)


@dataclass(frozen=True)
class CycElement:
    """An element of Q(zeta_N) in the reduced power basis."""

    order: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("cyclotomic order must be >= 1")
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if len(coeffs) != euler_phi(self.order):
            raise ValueError(
                f"expected {euler_phi(self.order)} coordinates for order {self.order}, "
                f"got {len(coeffs)}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, order: int) -> "CycElement":
        return cls(order, (Fraction(0),) * euler_phi(order))

    @classmethod
    def from_rational(cls, order: int, value: Rational) -> "CycElement":
        coeffs = [Fraction(0)] * euler_phi(order)
        coeffs[0] = Fraction(value)
        return cls(order, tuple(coeffs))

    @classmethod
    def one(cls, order: int) -> "CycElement":
        return cls.from_rational(order, 1)

    @classmethod
    def root_of_unity(cls, order: int, k: int) -> "CycElement":
        """zeta_order^k, with k taken modulo order."""
        row = _power_basis_table(order)[k % order]
        return cls(order, tuple(Fraction(c) for c in row))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "CycElement") -> "CycElement":
        self._check_order(other)
        return CycElement(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CycElement") -> "CycElement":
        self._check_order(other)
        return CycElement(self.order, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CycElement":
        return CycElement(self.order, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return CycElement(self.order, tuple(a * q for a in self.coeffs))
        if not isinstance(other, CycElement):
            return NotImplemented
        self._check_order(other)
        n, d = self.order, len(self.coeffs)
        # Convolve, then fold exponents modulo n (valid since x^n == 1 holds
        # in the quotient ring) and reduce the remaining high powers.
        folded = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    folded[(i + j) % n] += a * b
        table = _power_basis_table(n)
        out = list(folded[:d])
        for j in range(d, n):
            c = folded[j]
            if c:
                row = table[j]
                for i in range(d):
                    if row[i]:
                        out[i] += c * row[i]
        return CycElement(n, tuple(out))

    __rmul__ = __mul__

    def to_order(self, order: int) -> "CycElement":
        """Embed into Q(zeta_order); requires self.order to divide order."""
        if order % self.order != 0:
            raise ValueError(f"cannot embed order {self.order} into order {order}")
        if order == self.order:
            return self
        step = order // self.order
        d = euler_phi(order)
        table = _power_basis_table(order)
        out = [Fraction(0)] * d
        for i, a in enumerate(self.coeffs):
            if a:
                row = table[(i * step) % order]
                for j in range(d):
                    if row[j]:
                        out[j] += a * row[j]
        return CycElement(order, tuple(out))

    def to_complex(self) -> complex:
        total = 0j
        for i, a in enumerate(self.coeffs):
            if a:
                total += float(a) * cmath.exp(2j * math.pi * i / self.order)
        return total

    def _check_order(self, other: "CycElement") -> None:
        if self.order != other.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __repr__(self) -> str:
        return f"CycElement({self.order}, {_format_cyc(self)!r})"


def cyc_mul(a: CycElement, b: CycElement) -> CycElement:
    return a * b


def cyc_is_zero(a: CycElement) -> bool:
    return a.is_zero()


@dataclass(frozen=True)
class FieldElement:
    """A finite sum of terms ``c * t^q`` in canonical (sorted, reduced) form."""

    order: int
    terms: tuple[tuple[Fraction, CycElement], ...]

    def __post_init__(self):
        prev = None
        for q, c in self.terms:
            if not isinstance(q, Fraction):
                raise ValueError("exponents must be Fraction")
            if c.order != self.order:
                raise ValueError("coefficient order mismatch")
            if c.is_zero():
                raise ValueError("stored coefficients must be nonzero")
            if prev is not None and q <= prev:
                raise ValueError("exponents must be strictly ascending")
            prev = q

    @classmethod
    def from_terms(cls, order: int,
                   terms: Iterable[tuple[Rational, CycElement]]) -> "FieldElement":
        acc: dict[Fraction, CycElement] = {}
        for q, c in terms:
            q = Fraction(q)
            if q in acc:
                acc[q] = acc[q] + c
            else:
                acc[q] = c
        cleaned = tuple(sorted((q, c) for q, c in acc.items() if not c.is_zero()))
        return cls(order, cleaned)

    @classmethod
    def zero(cls, order: int) -> "FieldElement":
        return cls(order, ())

    @classmethod
    def one(cls, order: int) -> "FieldElement":
        return cls.monomial(order, CycElement.one(order), 0)

    @classmethod
    def from_rational(cls, order: int, value: Rational) -> "FieldElement":
        return cls.from_terms(order, [(Fraction(0), CycElement.from_rational(order, value))])

    @classmethod
    def monomial(cls, order: int, coeff: CycElement, exponent: Rational) -> "FieldElement":
        return cls.from_terms(order, [(Fraction(exponent), coeff)])

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Fraction | float:
        """Smallest exponent, or +inf for the zero element."""
        if not self.terms:
            return math.inf
        return self.terms[0][0]

    def leading_coefficient(self) -> CycElement:
        if not self.terms:
            raise ValueError("zero element has no leading coefficient")
        return self.terms[0][1]

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check_order(other)
        return FieldElement.from_terms(self.order, list(self.terms) + list(other.terms))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self + (-other)

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.order, tuple((q, -c) for q, c in self.terms))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return FieldElement.zero(self.order)
            return FieldElement(self.order, tuple((q, c * other) for q, c in self.terms))
        if isinstance(other, CycElement):
            return self * FieldElement.monomial(self.order, other, 0)
        if not isinstance(other, FieldElement):
            return NotImplemented
        self._check_order(other)
        acc: dict[Fraction, CycElement] = {}
        for q1, c1 in self.terms:
            for q2, c2 in other.terms:
                q = q1 + q2
                prod = c1 * c2
                acc[q] = acc[q] + prod if q in acc else prod
        return FieldElement.from_terms(self.order, acc.items())

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "FieldElement":
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = FieldElement.one(self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def to_order(self, order: int) -> "FieldElement":
        if order == self.order:
            return self
        return FieldElement(order, tuple((q, c.to_order(order)) for q, c in self.terms))

    def _check_order(self, other: "FieldElement") -> None:
        if self.order != other.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __repr__(self) -> str:
        return f"FieldElement({self.order}, {format_element(self)!r})"


def series_valuation(x: FieldElement) -> Fraction | float:
    """Valuation of a field element: min exponent, +inf for zero."""
    return x.valuation()


# ---------------------------------------------------------------------------
# Textual element syntax.
#
#   element  := product (('+' | '-') product)*
#   product  := unary ('*' unary)*
#   unary    := '-' unary | atom
#   atom     := NUMBER | 'z' ['^' sint] | 't' ['^' exponent] | '(' element ')'
#   exponent := sint | srat | '(' srat ')'
#   NUMBER   := digits ['/' digits]
#
# 'z' denotes the primitive root of unity of the ambient order; 't' the
# uniformizer carrying the valuation.

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[\^*+\-()]))"
)


class ElementSyntaxError(ValueError):
    def __init__(self, message: str, column: int):
        self.column = column
        super().__init__(f"{message} at column {column + 1}")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            col = len(text) - len(stripped)
            raise ElementSyntaxError(f"unexpected character {stripped[0]!r}", col)
        if match.lastgroup == "num":
            tokens.append(("num", match.group("num"), match.start("num")))
        elif match.lastgroup == "name":
            tokens.append(("name", match.group("name"), match.start("name")))
        else:
            tokens.append(("op", match.group("op"), match.start("op")))
        pos = match.end()
    return tokens


class _ElementParser:
    def __init__(self, text: str, order: int):
        self.text = text
        self.order = order
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self):
        tok = self.peek()
        if tok is None:
            raise ElementSyntaxError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        tok = self.advance()
        if tok[0] != "op" or tok[1] != op:
            raise ElementSyntaxError(f"expected {op!r}", tok[2])

    def parse(self) -> FieldElement:
        value = self.parse_sum()
        tok = self.peek()
        if tok is not None:
            raise ElementSyntaxError(f"unexpected trailing input {tok[1]!r}", tok[2])
        return value

    def parse_sum(self) -> FieldElement:
        value = self.parse_product()
        while True:
            tok = self.peek()
            if tok is not None and tok[0] == "op" and tok[1] in "+-":
                self.advance()
                rhs = self.parse_product()
                value = value + rhs if tok[1] == "+" else value - rhs
            else:
                return value

    def parse_product(self) -> FieldElement:
        value = self.parse_unary()
        while True:
            tok = self.peek()
            if tok is not None and tok[0] == "op" and tok[1] == "*":
                self.advance()
                value = value * self.parse_unary()
            else:
                return value

    def parse_unary(self) -> FieldElement:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "-":
            self.advance()
            return -self.parse_unary()
        return self.parse_atom()

    def parse_atom(self) -> FieldElement:
        tok = self.advance()
        kind, text, col = tok
        if kind == "num":
            return FieldElement.from_rational(self.order, Fraction(text))
        if kind == "name":
            if text == "z":
                k = 1
                if self._at_caret():
                    k = self._parse_signed_int()
                return FieldElement.monomial(
                    self.order, CycElement.root_of_unity(self.order, k), 0)
            if text == "t":
                q = Fraction(1)
                if self._at_caret():
                    q = self._parse_exponent()
                return FieldElement.monomial(self.order, CycElement.one(self.order), q)
            raise ElementSyntaxError(f"unknown symbol {text!r}", col)
        if kind == "op" and text == "(":
            value = self.parse_sum()
            self.expect_op(")")
            return value
        raise ElementSyntaxError(f"unexpected token {text!r}", col)

    def _at_caret(self) -> bool:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "^":
            self.advance()
            return True
        return False

    def _parse_signed_rational(self) -> Fraction:
        sign = 1
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "-":
            self.advance()
            sign = -1
        tok = self.advance()
        if tok[0] != "num":
            raise ElementSyntaxError("expected a rational exponent", tok[2])
        return sign * Fraction(tok[1])

    def _parse_signed_int(self) -> int:
        q = self._parse_signed_rational()
        if q.denominator != 1:
            raise ElementSyntaxError("root-of-unity exponents must be integers",
                                     self.tokens[self.pos - 1][2])
        return int(q)

    def _parse_exponent(self) -> Fraction:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "(":
            self.advance()
            q = self._parse_signed_rational()
            self.expect_op(")")
            return q
        return self._parse_signed_rational()


def parse_element(text: str, order: int) -> FieldElement:
    """Parse the textual element syntax; ``z`` is the primitive order-th root."""
    return _ElementParser(text, order).parse()


def _format_cyc(c: CycElement) -> str:
    parts = []
    for i, a in enumerate(c.coeffs):
        if not a:
            continue
        if i == 0:
            parts.append(str(a))
        elif i == 1:
            parts.append(f"{a}*z")
        else:
            parts.append(f"{a}*z^{i}")
    return " + ".join(parts) if parts else "0"


def format_element(x: FieldElement) -> str:
    """Canonical printer; ``parse_element(format_element(x), x.order) == x``."""
    if x.is_zero():
        return "0"
    parts = []
    for q, c in x.terms:
        body = f"({_format_cyc(c)})"
        if q != 0:
            body = f"{body} * t^({q})"
        parts.append(body)
    return " + ".join(parts)


def iter_coeffs(x: FieldElement) -> Iterator[tuple[Fraction, CycElement]]:
    return iter(x.terms)

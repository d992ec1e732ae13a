"""Univariate polynomials with exact rational coefficients.

Coefficients are stored ascending and normalized so that the leading
coefficient is nonzero (the zero polynomial has an empty tuple).  Integral
coefficients render as plain integers.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Union

from .errors import MixedUnknowns

Number = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def fmt_rational(q: Number) -> str:
    """Lowest-terms rendering, ``p/q`` or a bare integer."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _merge_var(a: str | None, b: str | None) -> str | None:
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise MixedUnknowns(f"unknowns {a!r} and {b!r} cannot be combined")


class UniPoly:
    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable = (), var: str | None = None):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        # a constant carries no variable name
        self.var = var if len(self.coeffs) > 1 else None

    @classmethod
    def const(cls, c) -> "UniPoly":
        return cls([c])

    @classmethod
    def variable(cls, name: str) -> "UniPoly":
        return cls([0, 1], name)

    @classmethod
    def coerce(cls, value) -> "UniPoly":
        if isinstance(value, UniPoly):
            return value
        return cls.const(value)

    # ---- structure ----------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def int_coeffs(self) -> list[int]:
        if not self.is_integral():
            raise ValueError(f"{self} has non-integer coefficients")
        return [int(c) for c in self.coeffs]

    def content(self) -> Fraction:
        """Positive rational content; the zero polynomial has content 0."""
        if not self.coeffs:
            return Fraction(0)
        den = reduce(lcm, (c.denominator for c in self.coeffs), 1)
        num = reduce(gcd, (int(c * den) for c in self.coeffs), 0)
        return Fraction(num, den)

    # ---- arithmetic ---------------------------------------------------

    def __add__(self, other) -> "UniPoly":
        other = UniPoly.coerce(other)
        var = _merge_var(self.var, other.var)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly((self.coeff(i) + other.coeff(i) for i in range(n)), var)

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly((-c for c in self.coeffs), self.var)

    def __sub__(self, other) -> "UniPoly":
        return self + (-UniPoly.coerce(other))

    def __rsub__(self, other) -> "UniPoly":
        return UniPoly.coerce(other) - self

    def __mul__(self, other) -> "UniPoly":
        other = UniPoly.coerce(other)
        var = _merge_var(self.var, other.var)
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out, var)

    __rmul__ = __mul__

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        other = UniPoly.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        var = _merge_var(self.var, other.var)
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.coeffs[-1]
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            if c:
                quot[i - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return UniPoly(quot, var), UniPoly(rem[:dq] if dq > 0 else [], var)

    def exact_div(self, other) -> "UniPoly":
        q, r = self.divmod(UniPoly.coerce(other))
        if not r.is_zero():
            raise ArithmeticError(f"{self} is not divisible by {other}")
        return q

    def __call__(self, value) -> Fraction:
        value = as_fraction(value)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def substitute(self, value) -> "UniPoly":
        return UniPoly.const(self(value))

    # ---- comparison / rendering --------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = UniPoly.const(other)
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs and (self.var == other.var or self.is_constant())

    def __hash__(self) -> int:
        return hash((self.coeffs, self.var))

    def __repr__(self) -> str:
        return f"UniPoly({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        v = self.var or "x"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = fmt_rational(abs(c))
            if i == 0:
                body = mag
            else:
                mono = v if i == 1 else f"{v}^{i}"
                body = mono if abs(c) == 1 else f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> list[str]:
        return [fmt_rational(c) for c in self.coeffs]


def _power_label(n: int) -> str:
    """Render a positive integer, as ``2^e`` when it is a power of two >= 4."""
    if n >= 4 and n & (n - 1) == 0:
        return f"2^{n.bit_length() - 1}"
    return str(n)


def factor_str(p: UniPoly) -> str:
    """Human-readable factorization over Q into content and linear factors.

    >>> factor_str(UniPoly([-32768, 4096], "x"))
    '2^12*(x-8)'
    """
    from .lattice import rational_roots  # local import: lattice depends on poly

    if p.is_zero():
        return "0"
    if p.is_constant():
        return fmt_rational(p.constant())
    v = p.var or "x"
    rest = p
    factors: list[str] = []
    roots = rational_roots(p) if p.degree <= 2 else []
    for r in roots:
        num, den = r.numerator, r.denominator
        lin = UniPoly([-num, den], p.var)
        rest = rest.exact_div(lin)
        lead = v if den == 1 else f"{den}{v}"
        if num == 0:
            factors.append(v if den == 1 else f"({lead})")
        else:
            factors.append(f"({lead}{'-' if num > 0 else '+'}{abs(num)})")
    # rest is now a constant or an irreducible remainder
    if rest.is_constant():
        c = rest.constant()
        sign = "-" if c < 0 else ""
        c = abs(c)
        head = "" if c == 1 else (
            _power_label(int(c)) if c.denominator == 1 else fmt_rational(c)
        )
    else:
        sign, head = "", f"({rest})"
    parts = ([head] if head else []) + factors
    return sign + "*".join(parts)

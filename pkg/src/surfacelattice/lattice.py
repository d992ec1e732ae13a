"""Exact intersection-form arithmetic over a finite set of divisor symbols.

An :class:`IntersectionSpace` holds a symmetric pairing whose entries are
integers or polynomials of degree at most one in a single unknown (for
instance ``x = D.F`` before the determinant condition pins it down).
Classes are formal rational combinations of the symbols.  Nothing here ever
touches floating point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import isqrt
from typing import Iterable, Mapping, Sequence, Union

from . import certificate as cert
from .certificate import Certificate, Verdict
from .errors import (
    DegreeTooHigh,
    MixedUnknowns,
    NonPositiveSquare,
    NotSymmetric,
    SingularBasis,
    UndeclaredPairing,
    UnknownPairing,
    UnknownSymbol,
    ZeroPolynomial,
)
from .poly import UniPoly, as_fraction, fmt_rational

Matrix = list[list[UniPoly]]


# ---------------------------------------------------------------------------
# divisor classes


class DivisorClass(Mapping[str, Fraction]):
    """Immutable formal combination ``sum(c_s * s)`` with zero terms dropped."""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Mapping[str, object] | None = None, **kw):
        items = dict(coeffs or {})
        items.update(kw)
        self._coeffs = {
            s: q for s, q in ((s, as_fraction(c)) for s, c in items.items()) if q != 0
        }
        self._hash = None

    @classmethod
    def of(cls, symbol: str) -> "DivisorClass":
        return cls({symbol: 1})

    @classmethod
    def zero(cls) -> "DivisorClass":
        return cls()

    @classmethod
    def parse(cls, text: str) -> "DivisorClass":
        """Parse expressions such as ``-6K+2F+2G+N0`` or ``M4-(2F+2G+N0)``.

        Bare symbol names only; a parenthesised group may follow a sign or a
        rational multiplier.  Named derived classes are resolved by
        :meth:`Scenario.cls`, not here.
        """
        return _parse_expr(text, {})

    def __getitem__(self, key: str) -> Fraction:
        return self._coeffs[key]

    def get(self, key, default=Fraction(0)):
        return self._coeffs.get(key, default)

    def __iter__(self):
        return iter(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        out = dict(self._coeffs)
        for s, c in other.items():
            out[s] = out.get(s, Fraction(0)) + c
        return DivisorClass(out)

    def __neg__(self) -> "DivisorClass":
        return DivisorClass({s: -c for s, c in self._coeffs.items()})

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + (-other)

    def __mul__(self, q) -> "DivisorClass":
        q = as_fraction(q)
        return DivisorClass({s: c * q for s, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, DivisorClass):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    def is_zero(self) -> bool:
        return not self._coeffs

    def render(self, order: Sequence[str] | None = None) -> str:
        if not self._coeffs:
            return "0"
        keys = list(self._coeffs)
        if order is not None:
            rank = {s: i for i, s in enumerate(order)}
            keys.sort(key=lambda s: (rank.get(s, len(rank)), s))
        out = ""
        for s in keys:
            c = self._coeffs[s]
            mag = abs(c)
            body = s if mag == 1 else f"{fmt_rational(mag)}{s}"
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += ("-" if c < 0 else "+") + body
        return out

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"DivisorClass({self.render()!r})"

    def to_json(self) -> dict[str, str | int]:
        return {
            s: (int(c) if c.denominator == 1 else fmt_rational(c))
            for s, c in sorted(self._coeffs.items())
        }


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_']*)|(.))")


def _parse_expr(text: str, named: Mapping[str, DivisorClass]) -> DivisorClass:
    tokens = [m.groups() for m in _TOKEN.finditer(text) if m.group(0).strip()]
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None, None)

    def parse_sum() -> DivisorClass:
        nonlocal pos
        sign = 1
        if peek()[2] in ("+", "-"):
            sign = -1 if peek()[2] == "-" else 1
            pos += 1
        total = parse_term() * sign
        while peek()[2] in ("+", "-"):
            sign = -1 if peek()[2] == "-" else 1
            pos += 1
            total = total + parse_term() * sign
        return total

    def parse_term() -> DivisorClass:
        nonlocal pos
        num, name, op = peek()
        scale = Fraction(1)
        if num is not None:
            scale = Fraction(num)
            pos += 1
            if peek()[2] == "*":
                pos += 1
            num, name, op = peek()
        if name is not None:
            pos += 1
            base = named[name] if name in named else DivisorClass.of(name)
            return base * scale
        if op == "(":
            pos += 1
            inner = parse_sum()
            if peek()[2] != ")":
                raise ValueError(f"unbalanced parentheses in {text!r}")
            pos += 1
            return inner * scale
        if op is None and num is not None:
            raise ValueError(f"bare number in class expression {text!r}")
        raise ValueError(f"cannot parse class expression {text!r}")

    if not text.strip() or text.strip() == "0":
        return DivisorClass()
    result = parse_sum()
    if pos != len(tokens):
        raise ValueError(f"trailing input in class expression {text!r}")
    return result


def parse_class(text: str, named: Mapping[str, DivisorClass] | None = None) -> DivisorClass:
    return _parse_expr(text, named or {})


ClassLike = Union[DivisorClass, str]


# ---------------------------------------------------------------------------
# intersection space


def _key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class IntersectionSpace:
    symbols: tuple[str, ...]
    gram: Mapping[tuple[str, str], UniPoly] = field(repr=False)
    rank_bound: int | None = None
    unknown: str | None = None

    def __post_init__(self):
        if self.rank_bound is not None and self.rank_bound < 1:
            raise ValueError("rank_bound must be >= 1")
        names = set(self.symbols)
        if len(names) != len(self.symbols):
            raise ValueError("duplicate symbol")
        unknowns = set()
        for (a, b), v in self.gram.items():
            if a not in names or b not in names:
                raise UnknownSymbol(f"Gram entry {a}.{b} names an undeclared symbol")
            if v.degree > 1:
                raise DegreeTooHigh(f"Gram entry {a}.{b} has degree {v.degree}")
            if v.var is not None:
                unknowns.add(v.var)
        if self.unknown is not None:
            unknowns.add(self.unknown)
        if len(unknowns) > 1:
            raise MixedUnknowns(f"several unknowns in one space: {sorted(unknowns)}")
        object.__setattr__(self, "unknown", next(iter(unknowns), None))

    @classmethod
    def build(
        cls,
        symbols: Iterable[str],
        entries: Mapping[tuple[str, str] | str, object],
        rank_bound: int | None = None,
    ) -> "IntersectionSpace":
        """Build from ``{("A", "B"): value}`` or ``{"A.B": value}`` entries.

        A value is an int/Fraction, a :class:`UniPoly`, or the unknown's name.
        """
        gram: dict[tuple[str, str], UniPoly] = {}
        for k, v in entries.items():
            a, b = k.split(".") if isinstance(k, str) else k
            key = _key(a, b)
            p = UniPoly.variable(v) if isinstance(v, str) else UniPoly.coerce(v)
            if key in gram and gram[key] != p:
                raise ValueError(f"conflicting entries for {a}.{b}")
            gram[key] = p
        return cls(tuple(symbols), gram, rank_bound)

    def has(self, symbol: str) -> bool:
        return symbol in self.symbols

    def entry(self, a: str, b: str) -> UniPoly:
        try:
            return self.gram[_key(a, b)]
        except KeyError:
            for s in (a, b):
                if s not in self.symbols:
                    raise UnknownSymbol(f"symbol {s!r} not in space") from None
            raise UndeclaredPairing(a, b) from None

    def is_declared(self, a: str, b: str) -> bool:
        return _key(a, b) in self.gram

    @property
    def resolved(self) -> bool:
        return self.unknown is None

    def resolve(self, value) -> "IntersectionSpace":
        """Substitute a value for the unknown everywhere."""
        value = as_fraction(value)
        gram = {k: (v.substitute(value) if v.var else v) for k, v in self.gram.items()}
        return IntersectionSpace(self.symbols, gram, self.rank_bound, None)

    def restrict(self, symbols: Sequence[str]) -> "IntersectionSpace":
        """Sub-space on ``symbols``, keeping only entries among them."""
        keep = set(symbols)
        missing = keep - set(self.symbols)
        if missing:
            raise UnknownSymbol(f"not in space: {sorted(missing)}")
        gram = {k: v for k, v in self.gram.items() if k[0] in keep and k[1] in keep}
        unknown = self.unknown if any(v.var for v in gram.values()) else None
        return IntersectionSpace(tuple(symbols), gram, self.rank_bound, unknown)

    def extend(self, symbol: str, pairings: Mapping[str, object]) -> "IntersectionSpace":
        """Add a symbol together with its pairings against existing symbols."""
        if symbol in self.symbols:
            raise ValueError(f"symbol {symbol!r} already present")
        gram = dict(self.gram)
        for other, v in pairings.items():
            gram[_key(symbol, other)] = UniPoly.coerce(v)
        return IntersectionSpace(self.symbols + (symbol,), gram, self.rank_bound, self.unknown)


def _as_class(c: ClassLike) -> DivisorClass:
    return DivisorClass.of(c) if isinstance(c, str) else c


def pair(space: IntersectionSpace, a: ClassLike, b: ClassLike) -> UniPoly:
    """Bilinear expansion of ``a . b`` over the space's Gram data."""
    a, b = _as_class(a), _as_class(b)
    c0 = c1 = Fraction(0)
    var = None
    gram = space.gram
    for s, cs in a.items():
        for t, ct in b.items():
            e = gram.get((s, t) if s <= t else (t, s))
            if e is None:
                e = space.entry(s, t)  # raises the precise error
            co = e.coeffs
            if co:
                w = cs * ct
                c0 += co[0] * w
                if len(co) > 1:
                    c1 += co[1] * w
                    var = e.var
    return UniPoly((c0, c1), var)


def pair_value(space: IntersectionSpace, a: ClassLike, b: ClassLike) -> Fraction:
    """Like :func:`pair` but insists on a constant result."""
    p = pair(space, a, b)
    if not p.is_constant():
        raise UnknownPairing(f"{_as_class(a)} . {_as_class(b)} = {p} is not yet known")
    return p.constant()


def gram_matrix(space: IntersectionSpace, classes: Sequence[ClassLike]) -> Matrix:
    cs = [_as_class(c) for c in classes]
    n = len(cs)
    m: Matrix = [[UniPoly()] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = pair(space, cs[i], cs[j])
    return m


# ---------------------------------------------------------------------------
# determinants


def cofactor_det(m: Sequence[Sequence]) -> UniPoly:
    """Laplace expansion along the first row; the reference oracle."""
    n = len(m)
    if n == 0:
        return UniPoly.const(1)
    rows = [[UniPoly.coerce(v) for v in r] for r in m]
    if n == 1:
        return rows[0][0]
    total = UniPoly()
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * cofactor_det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def bareiss_det(m: Sequence[Sequence]) -> UniPoly:
    """Fraction-free Bareiss elimination over Q[x]; every division is exact."""
    n = len(m)
    if n == 0:
        return UniPoly.const(1)
    a = [[UniPoly.coerce(v) for v in r] for r in m]
    if any(len(r) != n for r in a):
        raise ValueError("matrix is not square")
    sign = 1
    prev = UniPoly.const(1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return UniPoly()
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]).exact_div(prev)
            a[i][k] = UniPoly()
        prev = pivot
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


def det_poly(m: Sequence[Sequence]) -> UniPoly:
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("matrix is not square")
    return cofactor_det(m) if n < 6 else bareiss_det(m)


def leibniz_det(m: Sequence[Sequence]) -> UniPoly:
    """Permutation-sum determinant; only sensible for tiny matrices."""
    n = len(m)
    total = UniPoly()
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = UniPoly.const(1)
        for i, j in enumerate(perm):
            term = term * UniPoly.coerce(m[i][j])
        total = total + (term if inv % 2 == 0 else -term)
    return total if n else UniPoly.const(1)


# ---------------------------------------------------------------------------
# roots


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def rational_roots(p: UniPoly) -> list[Fraction]:
    """All rational roots with multiplicity, ascending (degree <= 2 only)."""
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has every value as a root")
    if p.degree > 2:
        raise DegreeTooHigh(f"degree {p.degree} > 2")
    if p.degree <= 0:
        return []
    if p.degree == 1:
        return [-p.coeff(0) / p.coeff(1)]
    c, b, a = p.coeff(0), p.coeff(1), p.coeff(2)
    s = _rational_sqrt(b * b - 4 * a * c)
    if s is None:
        return []
    return sorted([(-b - s) / (2 * a), (-b + s) / (2 * a)])


# ---------------------------------------------------------------------------
# radical, index theorem, signature, solving


def radical_member(
    space: IntersectionSpace, e: ClassLike, generators: Sequence[ClassLike]
) -> bool:
    """True iff ``e`` pairs to zero with itself and with every generator."""
    e = _as_class(e)
    for g in [e, *generators]:
        if pair_value(space, e, g) != 0:
            return False
    return True


def radical_witness(
    space: IntersectionSpace, e: ClassLike, generators: Sequence[ClassLike]
) -> tuple[DivisorClass | None, list[str]]:
    """First generator pairing nonzero with ``e``, plus any skipped generators.

    Generators whose pairing with ``e`` is undeclared or still unknown are
    skipped; skipping can only hide a witness, never invent one.
    """
    e = _as_class(e)
    skipped: list[str] = []
    for g in [e, *generators]:
        g = _as_class(g)
        try:
            v = pair_value(space, e, g)
        except (UndeclaredPairing, UnknownPairing):
            skipped.append(g.render(space.symbols))
            continue
        if v != 0:
            return g, skipped
    return None, skipped


def hodge_bound(
    space: IntersectionSpace,
    p: ClassLike,
    e: ClassLike,
    generators: Sequence[ClassLike] | None = None,
) -> Certificate:
    """Check ``e^2 * p^2 <= (p.e)^2`` for ``p^2 > 0``.

    A strict failure is a VIOLATION.  Equality means ``e`` must be
    proportional to ``p``; if ``e - (p.e / p^2) p`` visibly pairs nonzero
    with some generator (default: every symbol of the space) the data
    contradict hyperbolicity and the result is also a VIOLATION.
    """
    p, e = _as_class(p), _as_class(e)
    pp = pair_value(space, p, p)
    if pp <= 0:
        raise NonPositiveSquare(f"{p.render(space.symbols)}^2 = {fmt_rational(pp)} <= 0")
    ee = pair_value(space, e, e)
    pe = pair_value(space, p, e)
    bound = pe * pe / pp
    pr = p.render(space.symbols)
    er = e.render(space.symbols)
    premises = [
        (f"({pr})^2", pp, ("pair", p, p)),
        (f"({er})^2", ee, ("pair", e, e)),
        (f"({pr}).({er})", pe, ("pair", p, e)),
        (f"bound on ({er})^2", bound),
    ]
    if ee > bound:
        return cert.make(
            "hodge_bound", premises,
            f"({er})^2 = {fmt_rational(ee)} exceeds {fmt_rational(bound)}",
            Verdict.VIOLATION, anchor="algebraic index theorem",
        )
    if ee == bound:
        residual = e - p * (pe / pp)
        gens = [DivisorClass.of(s) for s in space.symbols] if generators is None else generators
        witness, skipped = radical_witness(space, residual, gens)
        if witness is not None:
            w = witness.render(space.symbols)
            premises.append(
                (f"({residual.render(space.symbols)}).({w})",
                 pair_value(space, residual, witness), ("pair", residual, witness))
            )
            return cert.make(
                "hodge_bound", premises,
                f"equality forces {er} proportional to {pr}, but the difference "
                f"pairs nonzero with {w}",
                Verdict.VIOLATION, anchor="algebraic index theorem (equality case)",
            )
        return cert.make(
            "hodge_bound", premises,
            f"equality; {er} is numerically proportional to {pr} on the known span",
            Verdict.SATISFIED, anchor="algebraic index theorem (equality case)",
            data={"skipped_generators": skipped} if skipped else {},
        )
    return cert.make(
        "hodge_bound", premises,
        f"({er})^2 = {fmt_rational(ee)} <= {fmt_rational(bound)}",
        Verdict.SATISFIED, anchor="algebraic index theorem",
    )


def _constant_matrix(m: Sequence[Sequence]) -> list[list[Fraction]]:
    out = []
    for row in m:
        r = []
        for v in row:
            v = UniPoly.coerce(v) if not isinstance(v, (int, Fraction)) else UniPoly.const(v)
            if not v.is_constant():
                raise UnknownPairing(f"matrix entry {v} is not a constant")
            r.append(v.constant())
        out.append(r)
    return out


def signature(m: Sequence[Sequence]) -> tuple[int, int, int]:
    """Inertia ``(positive, negative, zero)`` by exact symmetric elimination."""
    a = _constant_matrix(m)
    n = len(a)
    for i in range(n):
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise NotSymmetric(f"entries ({i},{j}) and ({j},{i}) differ")
    pos = neg = 0
    active = list(range(n))
    while active:
        k = next((i for i in active if a[i][i] != 0), None)
        if k is None:
            # all remaining diagonals vanish; pair up an off-diagonal entry
            hit = next(((i, j) for i in active for j in active if i != j and a[i][j] != 0), None)
            if hit is None:
                break
            i, j = hit
            # congruence e_i -> e_i + e_j makes the (i,i) entry 2*a[i][j]
            for t in range(n):
                a[i][t] += a[j][t]
            for t in range(n):
                a[t][i] += a[t][j]
            k = i
        piv = a[k][k]
        pos += piv > 0
        neg += piv < 0
        active.remove(k)
        for i in active:
            f = a[i][k] / piv
            if f:
                for j in active:
                    a[i][j] -= f * a[k][j]
        for i in active:
            a[i][k] = a[k][i] = Fraction(0)
    return pos, neg, n - pos - neg


def solve_linear(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Unique solution of a square system, or :class:`SingularBasis`."""
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(b[i])] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise SingularBasis("Gram matrix of the basis is singular")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [vr - f * vc for vr, vc in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def solve_in_basis(
    space: IntersectionSpace, target: ClassLike, basis: Sequence[ClassLike]
) -> list[Fraction]:
    """Coefficients ``c`` with ``target.b_i = sum_j c_j b_j.b_i`` for every i."""
    g = _constant_matrix(gram_matrix(space, basis))
    rhs = [pair_value(space, target, b) for b in basis]
    return solve_linear(g, rhs)


def combine(coeffs: Sequence, basis: Sequence[ClassLike]) -> DivisorClass:
    total = DivisorClass()
    for c, b in zip(coeffs, basis):
        total = total + _as_class(b) * c
    return total

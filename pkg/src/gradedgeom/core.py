"""Graded commutative polynomial algebras on a single coordinate chart.

A :class:`GradingContext` is an ordered list of named coordinates carrying
integer degrees.  A coordinate is odd when its degree is odd.  Polynomials are
stored in Koszul normal form: every monomial lists its generators in chart
order, odd generators appear at most once, and any sign produced by reordering
has already been folded into the rational coefficient.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

__all__ = [
    "GradedError",
    "ContextMismatch",
    "DuplicateCoordinate",
    "UnknownCoordinate",
    "DegreeMismatch",
    "GradingContext",
    "Polynomial",
    "declare_chart",
    "multiply",
    "degree_of",
    "substitute",
    "ZERO",
    "NONHOMOGENEOUS",
]

ZERO = "zero"
NONHOMOGENEOUS = "nonhomogeneous"

Scalar = Union[int, Fraction]
Monomial = tuple  # tuple of nonnegative exponents aligned with the chart


class GradedError(Exception):
    """Base class for errors raised by the kernel."""


class ContextMismatch(GradedError, ValueError):
    pass


class DuplicateCoordinate(GradedError, ValueError):
    def __init__(self, name: str):
        super().__init__(f"duplicate coordinate name {name!r}")
        self.name = name


class UnknownCoordinate(GradedError, KeyError):
    def __init__(self, name: str):
        super().__init__(f"unknown coordinate {name!r}")
        self.name = name

    def __str__(self) -> str:
        return self.args[0]


class DegreeMismatch(GradedError, ValueError):
    pass


class GradingContext:
    """An ordered chart of named coordinates with integer degrees.

    The declaration order is the canonical monomial order.  Two contexts are
    equal when they declare the same names with the same degrees in the same
    order.
    """

    __slots__ = ("coords", "names", "degrees", "odd", "_index", "_hash")

    def __init__(self, coords: Iterable[tuple[str, int]]):
        coords = tuple((str(name), int(deg)) for name, deg in coords)
        index: dict[str, int] = {}
        for i, (name, _) in enumerate(coords):
            if name in index:
                raise DuplicateCoordinate(name)
            index[name] = i
        self.coords = coords
        self.names = tuple(name for name, _ in coords)
        self.degrees = tuple(deg for _, deg in coords)
        self.odd = tuple(deg % 2 == 1 for deg in self.degrees)
        self._index = index
        self._hash = hash(coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradingContext):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{n}:{d}" for n, d in self.coords)
        return f"{type(self).__name__}({body})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownCoordinate(name) from None

    def degree(self, name: str) -> int:
        return self.degrees[self.index(name)]

    def is_odd(self, name: str) -> bool:
        return self.odd[self.index(name)]

    # construction helpers

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def const(self, c: Scalar) -> Polynomial:
        c = Fraction(c)
        return Polynomial(self, {(0,) * len(self): c} if c else {})

    def one(self) -> Polynomial:
        return self.const(1)

    def gen(self, name: str) -> Polynomial:
        i = self.index(name)
        mono = tuple(1 if j == i else 0 for j in range(len(self)))
        return Polynomial(self, {mono: Fraction(1)})

    def gens(self) -> tuple[Polynomial, ...]:
        return tuple(self.gen(n) for n in self.names)

    def monomial(self, exponents: Mapping[str, int], coefficient: Scalar = 1) -> Polynomial:
        """The monomial with the given exponents, written in chart order."""
        mono = [0] * len(self)
        for name, e in exponents.items():
            if e < 0:
                raise ValueError(f"negative exponent for {name!r}")
            mono[self.index(name)] = int(e)
        if any(e > 1 and odd for e, odd in zip(mono, self.odd)):
            return self.zero()
        c = Fraction(coefficient)
        return Polynomial(self, {tuple(mono): c} if c else {})

    def extend(self, specs: Iterable[tuple[str, int]]) -> GradingContext:
        return GradingContext(self.coords + tuple(specs))

    def subcontext(self, names: Iterable[str]) -> GradingContext:
        """The context restricted to ``names``, keeping chart order."""
        keep = set(names)
        for n in keep:
            self.index(n)
        return GradingContext(c for c in self.coords if c[0] in keep)

    def monomial_degree(self, mono: Monomial) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees) if e)


def declare_chart(specs: Iterable[tuple[str, int]]) -> GradingContext:
    return GradingContext(specs)


def _mono_mul(ctx: GradingContext, a: Monomial, b: Monomial):
    """Product of two normalized monomials as ``(monomial, sign)`` or ``None``."""
    odd = ctx.odd
    parity = 0
    odd_in_a_to_the_right = 0
    for i in range(len(a) - 1, -1, -1):
        if odd[i]:
            if b[i]:
                if a[i]:
                    return None
                parity ^= odd_in_a_to_the_right & 1
            if a[i]:
                odd_in_a_to_the_right += 1
    return tuple(x + y for x, y in zip(a, b)), (-1 if parity else 1)


def _check_same(p: Polynomial, q: Polynomial) -> None:
    if p.ctx is not q.ctx and p.ctx != q.ctx:
        raise ContextMismatch(f"polynomials live on different charts: {p.ctx!r} vs {q.ctx!r}")


class Polynomial:
    """Exact rational linear combination of Koszul-normalized monomials.

    Instances are immutable.  ``terms`` maps exponent tuples (aligned with
    ``ctx``) to nonzero :class:`~fractions.Fraction` coefficients.
    """

    __slots__ = ("ctx", "_terms", "_hash")

    def __init__(self, ctx: GradingContext, terms: Mapping[Monomial, Scalar]):
        clean = {}
        for mono, c in terms.items():
            if c:
                clean[mono] = c if type(c) is Fraction else Fraction(c)
        self.ctx = ctx
        self._terms = clean
        self._hash = None

    @classmethod
    def from_terms(cls, ctx: GradingContext, terms: Mapping[Monomial, Scalar]) -> Polynomial:
        """Validate raw exponent tuples and build a normalized polynomial."""
        out: dict[Monomial, Fraction] = {}
        n = len(ctx)
        for mono, c in terms.items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n or any(e < 0 for e in mono):
                raise ValueError(f"bad exponent tuple {mono!r} for {ctx!r}")
            if any(e > 1 and odd for e, odd in zip(mono, ctx.odd)):
                continue
            out[mono] = out.get(mono, Fraction(0)) + Fraction(c)
        return cls(ctx, out)

    # mapping-ish access

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in canonical output order (higher polynomial degree first)."""
        return sorted(self._terms.items(), key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self.ctx), Fraction(0))

    def coefficient(self, exponents: Mapping[str, int]) -> Fraction:
        mono = [0] * len(self.ctx)
        for name, e in exponents.items():
            mono[self.ctx.index(name)] = e
        return self._terms.get(tuple(mono), Fraction(0))

    def variables(self) -> set[str]:
        used = set()
        for mono in self._terms:
            used.update(self.ctx.names[i] for i, e in enumerate(mono) if e)
        return used

    def polynomial_degree(self) -> int:
        """Largest number of generator factors in a monomial (-1 for zero)."""
        return max((sum(m) for m in self._terms), default=-1)

    def degree(self):
        return degree_of(self)

    # arithmetic

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            _check_same(self, other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(self.ctx, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.ctx, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, c: Scalar) -> Polynomial:
        c = Fraction(c)
        if not c:
            return self.ctx.zero()
        return Polynomial(self.ctx, {m: v * c for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, e: int) -> Polynomial:
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ctx.one()
        base = self
        while e:
            if e & 1:
                result = multiply(result, base)
            e >>= 1
            if e:
                base = multiply(base, base)
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ctx.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ctx == other.ctx and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({plain(self)})"

    def __str__(self) -> str:
        return plain(self)

    def normalized(self) -> Polynomial:
        """Re-normalize by rebuilding every term from its generators."""
        out = self.ctx.zero()
        for mono, c in self._terms.items():
            term = self.ctx.const(c)
            for i, e in enumerate(mono):
                for _ in range(e):
                    term = multiply(term, self.ctx.gen(self.ctx.names[i]))
            out = out + term
        return out

    def substitute(self, assignment: Mapping[str, Polynomial]) -> Polynomial:
        return substitute(self, assignment)

    def transfer(self, ctx: GradingContext) -> Polynomial:
        """Rewrite on another chart that declares every coordinate used here."""
        if ctx == self.ctx:
            return self
        used = [i for i in range(len(self.ctx)) if any(m[i] for m in self._terms)]
        targets = []
        for i in used:
            name = self.ctx.names[i]
            j = ctx.index(name)
            if ctx.degrees[j] != self.ctx.degrees[i]:
                raise DegreeMismatch(f"coordinate {name!r} changes degree between charts")
            targets.append(j)
        n = len(ctx)
        odd_targets = [j for i, j in zip(used, targets) if self.ctx.odd[i]]
        if odd_targets == sorted(odd_targets):
            # relative order of odd generators is preserved, so no signs
            out = {}
            for mono, c in self._terms.items():
                new = [0] * n
                for i, j in zip(used, targets):
                    new[j] = mono[i]
                out[tuple(new)] = c
            return Polynomial(ctx, out)
        result = ctx.zero()
        for mono, c in self._terms.items():
            term = ctx.const(c)
            for i, j in zip(used, targets):
                for _ in range(mono[i]):
                    term = multiply(term, ctx.gen(ctx.names[j]))
            result = result + term
        return result


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    """Koszul-normalized product ``p*q``."""
    _check_same(p, q)
    ctx = p.ctx
    out: dict[Monomial, Fraction] = {}
    for ma, ca in p._terms.items():
        for mb, cb in q._terms.items():
            r = _mono_mul(ctx, ma, mb)
            if r is None:
                continue
            mono, sign = r
            c = ca * cb
            s = out.get(mono, 0) + (c if sign > 0 else -c)
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
    return Polynomial(ctx, out)


def degree_of(p: Polynomial):
    """Total degree if homogeneous, else ``"nonhomogeneous"``; ``"zero"`` for 0."""
    if not p._terms:
        return ZERO
    degs = {p.ctx.monomial_degree(m) for m in p._terms}
    if len(degs) == 1:
        return degs.pop()
    return NONHOMOGENEOUS


def substitute(p: Polynomial, assignment: Mapping[str, Polynomial]) -> Polynomial:
    """Simultaneous degree-preserving substitution of coordinates."""
    ctx = p.ctx
    subs: dict[int, Polynomial] = {}
    for name, value in assignment.items():
        i = ctx.index(name)
        if isinstance(value, (int, Fraction)):
            value = ctx.const(value)
        _check_same(p, value)
        d = degree_of(value)
        if d != ZERO and d != ctx.degrees[i]:
            raise DegreeMismatch(
                f"substitution for {name!r} has degree {d}, expected {ctx.degrees[i]}"
            )
        subs[i] = value
    if not subs:
        return p
    powers: dict[tuple[int, int], Polynomial] = {}

    def power(i: int, e: int) -> Polynomial:
        key = (i, e)
        if key not in powers:
            powers[key] = subs[i] ** e
        return powers[key]

    result: dict[Monomial, Fraction] = {}
    acc = ctx.zero()
    n = len(ctx)
    for mono, c in p._terms.items():
        if not any(mono[i] for i in subs):
            result[mono] = result.get(mono, 0) + c
            continue
        term = ctx.const(c)
        for i, e in enumerate(mono):
            if not e:
                continue
            if i in subs:
                factor = power(i, e)
            else:
                exps = [0] * n
                exps[i] = e
                factor = Polynomial(ctx, {tuple(exps): 1})
            term = multiply(term, factor)
            if not term:
                break
        acc = acc + term
    return Polynomial(ctx, result) + acc


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def plain(p: Polynomial, names: Optional[Sequence[str]] = None) -> str:
    """Plain-text rendering; ``names`` overrides the printed generator names."""
    if not p._terms:
        return "0"
    names = p.ctx.names if names is None else names
    pieces = []
    for mono, c in p.items():
        factors = []
        for i, e in enumerate(mono):
            if e == 1:
                factors.append(names[i])
            elif e > 1:
                factors.append(f"{names[i]}^{e}")
        mag = abs(c)
        if not factors:
            body = _fmt_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _fmt_coeff(mag) + "*" + "*".join(factors)
        pieces.append(("-" if c < 0 else "+", body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out

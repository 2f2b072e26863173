"""Graded vector fields acting as derivations of the function algebra."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .core import (
    ZERO,
    ContextMismatch,
    DegreeMismatch,
    GradingContext,
    Polynomial,
    degree_of,
    multiply,
)

__all__ = [
    "GradedVectorField",
    "CheckResult",
    "partial_derivative",
    "apply",
    "commutator",
    "euler_field",
    "is_cohomological",
    "odd_flow_first_order",
]


def partial_derivative(f: Polynomial, coord: str) -> Polynomial:
    """Left partial derivative with respect to ``coord``.

    Differentiating a monomial first moves the generator to the front, which
    costs ``(-1)^{|x_i| * (degree of what it hops over)}``.
    """
    ctx = f.ctx
    i = ctx.index(coord)
    odd_i = ctx.odd[i]
    odd = ctx.odd
    out: dict[tuple, Fraction] = {}
    for mono, c in f._terms.items():
        e = mono[i]
        if not e:
            continue
        coef = c * e
        if odd_i:
            hops = sum(1 for j in range(i) if mono[j] and odd[j])
            if hops & 1:
                coef = -coef
        new = mono[:i] + (e - 1,) + mono[i + 1 :]
        out[new] = out.get(new, 0) + coef
    return Polynomial(ctx, out)


class GradedVectorField:
    """A homogeneous derivation ``sum X^i d/dx^i``.

    ``components`` maps coordinate names to polynomials; zero components are
    dropped.  Each nonzero component must have degree ``|x^i| + degree``.
    """

    __slots__ = ("ctx", "components", "degree")

    def __init__(
        self,
        ctx: GradingContext,
        components: Mapping[str, Polynomial],
        degree: Optional[int] = None,
    ):
        comps = {}
        for name in ctx.names:
            comp = components.get(name)
            if comp is None:
                continue
            if isinstance(comp, (int, Fraction)):
                comp = ctx.const(comp)
            if comp.ctx != ctx:
                raise ContextMismatch(f"component {name!r} lives on another chart")
            if not comp:
                continue
            d = degree_of(comp)
            if d == "nonhomogeneous":
                raise DegreeMismatch(f"component {name!r} is not homogeneous")
            shift = d - ctx.degree(name)
            if degree is None:
                degree = shift
            elif shift != degree:
                raise DegreeMismatch(
                    f"component {name!r} has degree {d}; a field of degree {degree} "
                    f"needs {ctx.degree(name) + degree}"
                )
            comps[name] = comp
        for name in components:
            ctx.index(name)
        if degree is None:
            raise DegreeMismatch("the zero field needs an explicit degree")
        self.ctx = ctx
        self.components = comps
        self.degree = int(degree)

    @classmethod
    def zero(cls, ctx: GradingContext, degree: int) -> GradedVectorField:
        return cls(ctx, {}, degree)

    def component(self, name: str) -> Polynomial:
        self.ctx.index(name)
        return self.components.get(name, self.ctx.zero())

    def is_zero(self) -> bool:
        return not self.components

    def __call__(self, f: Polynomial) -> Polynomial:
        return apply(self, f)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedVectorField):
            return NotImplemented
        if self.ctx != other.ctx:
            return False
        if self.components != other.components:
            return False
        return self.degree == other.degree or not self.components

    def __hash__(self):
        return hash((self.ctx, frozenset(self.components.items())))

    def __add__(self, other: GradedVectorField) -> GradedVectorField:
        if self.ctx != other.ctx:
            raise ContextMismatch("vector fields live on different charts")
        if self.degree != other.degree and self.components and other.components:
            raise DegreeMismatch("cannot add fields of different degree")
        deg = self.degree if self.components else other.degree
        comps = dict(self.components)
        for k, v in other.components.items():
            comps[k] = comps.get(k, self.ctx.zero()) + v
        return GradedVectorField(self.ctx, comps, deg)

    def __neg__(self) -> GradedVectorField:
        return self.scale(-1)

    def __sub__(self, other: GradedVectorField) -> GradedVectorField:
        return self + (-other)

    def scale(self, c) -> GradedVectorField:
        return GradedVectorField(
            self.ctx, {k: v.scale(c) for k, v in self.components.items()}, self.degree
        )

    def times(self, f: Polynomial) -> GradedVectorField:
        """The field ``f X`` for homogeneous ``f``."""
        d = degree_of(f)
        if d == ZERO:
            return GradedVectorField.zero(self.ctx, self.degree)
        if d == "nonhomogeneous":
            raise DegreeMismatch("coefficient function must be homogeneous")
        return GradedVectorField(
            self.ctx, {k: multiply(f, v) for k, v in self.components.items()}, self.degree + d
        )

    def __repr__(self) -> str:
        if not self.components:
            return f"GradedVectorField(0, degree={self.degree})"
        body = " + ".join(f"({v}) d/d{k}" for k, v in self.components.items())
        return f"GradedVectorField({body}, degree={self.degree})"


def apply(X: GradedVectorField, f: Polynomial) -> Polynomial:
    if X.ctx != f.ctx:
        raise ContextMismatch("field and function live on different charts")
    out = f.ctx.zero()
    for name, comp in X.components.items():
        df = partial_derivative(f, name)
        if df:
            out = out + multiply(comp, df)
    return out


def commutator(X: GradedVectorField, Y: GradedVectorField) -> GradedVectorField:
    """Graded commutator ``X o Y - (-1)^{kl} Y o X``.

    A derivation is fixed by its values on coordinates, so the components are
    ``X(Y^j) - (-1)^{kl} Y(X^j)``.
    """
    if X.ctx != Y.ctx:
        raise ContextMismatch("vector fields live on different charts")
    k, l = X.degree, Y.degree
    sign = -1 if (k * l) % 2 else 1
    comps = {}
    for name in X.ctx.names:
        a = apply(X, Y.component(name))
        b = apply(Y, X.component(name))
        comps[name] = a - b if sign > 0 else a + b
    return GradedVectorField(X.ctx, comps, k + l)


def euler_field(ctx: GradingContext) -> GradedVectorField:
    comps = {
        name: ctx.gen(name).scale(deg) for name, deg in ctx.coords if deg != 0
    }
    return GradedVectorField(ctx, comps, 0)


@dataclass
class CheckResult:
    """Outcome of an identity check; truthy iff the identity holds."""

    ok: bool
    witness: Optional[Polynomial] = None
    where: Optional[str] = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def is_cohomological(X: GradedVectorField) -> CheckResult:
    if X.degree != 1:
        return CheckResult(False, where="degree", details={"degree": X.degree})
    square = commutator(X, X)
    for name in X.ctx.names:
        comp = square.components.get(name)
        if comp:
            return CheckResult(False, witness=comp, where=name, details={"square": square})
    return CheckResult(True, details={"square": square})


def odd_flow_first_order(X: GradedVectorField):
    """First-order expansion ``x(t) = x + t v`` of the flow along an odd-time field.

    Returns ``(velocity, obstruction)``.  The obstruction is the ``t``-linear
    part of ``X^i(x + tX)``, i.e. ``sum_j X^j dX^i/dx^j``; it vanishes exactly
    when ``[X, X] = 0``.
    """
    if X.degree != 1:
        raise DegreeMismatch(f"odd flow needs a degree 1 field, got {X.degree}")
    ctx = X.ctx
    t_name = "t"
    while t_name in ctx:
        t_name += "'"
    big = GradingContext(((t_name, -1),) + ctx.coords)
    t = big.gen(t_name)
    shifted = {
        name: big.gen(name) + multiply(t, comp.transfer(big))
        for name, comp in X.components.items()
    }
    velocity = dict(X.components)
    obstruction = {}
    for name in ctx.names:
        comp = X.component(name).transfer(big)
        moved = comp.substitute(shifted) if shifted else comp
        linear = {m[1:]: c for m, c in moved._terms.items() if m[0] == 1}
        obstruction[name] = Polynomial(ctx, linear)
    return velocity, obstruction

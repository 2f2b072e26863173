"""Differential forms as functions on the shifted tangent chart.

Doubling a chart appends a generator ``D[x]`` of degree ``|x| + 1`` for every
base coordinate ``x``.  Forms are ordinary polynomials on the doubled chart, the
de Rham differential is the vector field ``sum D[x] d/dx`` and contraction with
``d/dx`` is differentiation by ``D[x]``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Union

from .core import (
    NONHOMOGENEOUS,
    ZERO,
    ContextMismatch,
    DegreeMismatch,
    GradingContext,
    Polynomial,
    degree_of,
    multiply,
)
from .derivations import GradedVectorField, partial_derivative

__all__ = [
    "DoubledContext",
    "doubled",
    "d_name",
    "as_form",
    "de_rham",
    "contract",
    "lie_derivative",
    "form_degree",
    "total_degree",
    "degree_of_form",
    "form_part",
    "to_base",
]


def d_name(name: str) -> str:
    return f"D[{name}]"


class DoubledContext(GradingContext):
    """A base chart followed by the ``D[x]`` partners of its coordinates."""

    __slots__ = ("base", "partner", "_d_mask")

    def __init__(self, base: GradingContext):
        super().__init__(base.coords + tuple((d_name(n), d + 1) for n, d in base.coords))
        self.base = base
        self.partner = {n: d_name(n) for n in base.names}
        nb = len(base)
        self._d_mask = tuple(i >= nb for i in range(len(self)))

    def d_gen(self, name: str) -> Polynomial:
        return self.gen(self.partner[name])

    def form_degree_of(self, mono) -> int:
        nb = len(self.base)
        return sum(mono[nb:])


@lru_cache(maxsize=None)
def doubled(ctx: GradingContext) -> DoubledContext:
    if isinstance(ctx, DoubledContext):
        raise ValueError("chart is already doubled")
    return DoubledContext(ctx)


def _doubled_of(p: Polynomial) -> DoubledContext:
    if isinstance(p.ctx, DoubledContext):
        return p.ctx
    return doubled(p.ctx)


def as_form(f: Polynomial) -> Polynomial:
    """View a function on the base chart as a 0-form (no-op on forms)."""
    if isinstance(f.ctx, DoubledContext):
        return f
    ctx = doubled(f.ctx)
    pad = (0,) * len(f.ctx)
    return Polynomial(ctx, {m + pad: c for m, c in f._terms.items()})


def to_base(omega: Polynomial) -> Polynomial:
    """Drop a 0-form back to the base chart."""
    ctx = omega.ctx
    if not isinstance(ctx, DoubledContext):
        return omega
    nb = len(ctx.base)
    out = {}
    for m, c in omega._terms.items():
        if any(m[nb:]):
            raise DegreeMismatch("not a 0-form")
        out[m[:nb]] = c
    return Polynomial(ctx.base, out)


def de_rham(omega: Polynomial) -> Polynomial:
    omega = as_form(omega)
    ctx = omega.ctx
    out = ctx.zero()
    for name in ctx.base.names:
        dx = partial_derivative(omega, name)
        if dx:
            out = out + multiply(ctx.d_gen(name), dx)
    return out


def contract(X: GradedVectorField, omega: Polynomial) -> Polynomial:
    """``iota_X omega`` with ``iota_{d/dx} D[y] = delta`` extended as a derivation."""
    omega = as_form(omega)
    ctx = omega.ctx
    if X.ctx != ctx.base:
        raise ContextMismatch("vector field is not on the base chart of the form")
    out = ctx.zero()
    for name, comp in X.components.items():
        inner = partial_derivative(omega, ctx.partner[name])
        if inner:
            out = out + multiply(as_form(comp), inner)
    return out


def lie_derivative(X: GradedVectorField, omega: Polynomial) -> Polynomial:
    """Cartan: ``L_X = iota_X d + (-1)^{|X|} d iota_X``."""
    omega = as_form(omega)
    first = contract(X, de_rham(omega))
    second = de_rham(contract(X, omega))
    return first - second if X.degree % 2 else first + second


def form_degree(omega: Polynomial) -> Union[int, str]:
    omega = as_form(omega)
    if not omega:
        return ZERO
    degs = {omega.ctx.form_degree_of(m) for m in omega._terms}
    return degs.pop() if len(degs) == 1 else NONHOMOGENEOUS


def total_degree(omega: Polynomial):
    return degree_of(as_form(omega))


def degree_of_form(omega: Polynomial):
    """Total degree minus form degree, when constant across monomials."""
    omega = as_form(omega)
    if not omega:
        return ZERO
    ctx = omega.ctx
    degs = {ctx.monomial_degree(m) - ctx.form_degree_of(m) for m in omega._terms}
    return degs.pop() if len(degs) == 1 else NONHOMOGENEOUS


def form_part(omega: Polynomial, r: int) -> Polynomial:
    """The homogeneous component of form degree ``r``."""
    omega = as_form(omega)
    ctx = omega.ctx
    return Polynomial(ctx, {m: c for m, c in omega._terms.items() if ctx.form_degree_of(m) == r})

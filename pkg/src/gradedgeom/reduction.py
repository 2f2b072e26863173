"""Presymplectic reduction on linear constraint loci ``{z = 0 : z in Z}``.

Loci are coordinate subspaces and characteristic distributions are spanned by
constant vector fields, so the leaf space is itself a coordinate chart and the
smoothness hypotheses on it hold trivially.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Sequence, Union

from . import _linalg
from .core import GradedError, GradingContext, Polynomial, multiply
from .derivations import partial_derivative
from .forms import DoubledContext, as_form, doubled
from .structures import Bivector
from .symplectic import (
    Degenerate,
    NondegeneracyUnverified,
    SymplecticForm,
    _certified_inverse,
    check_symplectic,
    hamiltonian_vector_field,
    poisson_bracket,
    two_form_matrix,
)

__all__ = [
    "NON_CONSTANT_RANK",
    "NotReducible",
    "ConstraintLocus",
    "CoordinateDistribution",
    "PoissonReductionReport",
    "pullback_form",
    "characteristic_distribution",
    "is_reducible",
    "is_strongly_reducible",
    "reduce_function",
    "reduced_chart",
    "reduced_form",
    "reduced_bracket",
    "poisson_bracket_of_bivector",
    "poisson_reduction_conditions",
]

NON_CONSTANT_RANK = "non-constant-rank"


class NotReducible(GradedError):
    pass


@dataclass(frozen=True)
class ConstraintLocus:
    ctx: GradingContext
    constrained: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "constrained", tuple(self.constrained))
        for z in self.constrained:
            self.ctx.index(z)

    @property
    def retained(self) -> tuple[str, ...]:
        return tuple(n for n in self.ctx.names if n not in self.constrained)

    @property
    def chart(self) -> GradingContext:
        return self.ctx.subcontext(self.retained)

    def restrict(self, f: Polynomial) -> Polynomial:
        """``i* f``: set the constrained coordinates to zero."""
        if isinstance(f.ctx, DoubledContext):
            return pullback_form(f, self)
        g = f.substitute({z: 0 for z in self.constrained})
        return g.transfer(self.chart)


@dataclass(frozen=True)
class CoordinateDistribution:
    """Span of constant fields ``sum_a v^a d/dz^a`` on the locus chart.

    ``span`` lists the coordinate directions when every frame vector is a unit
    vector; otherwise it lists the pivot coordinates of the frame and
    ``aligned`` is false.
    """

    chart: GradingContext
    frame: tuple
    span: tuple[str, ...]
    aligned: bool = True

    @classmethod
    def from_coordinates(cls, chart: GradingContext, names: Iterable[str]) -> CoordinateDistribution:
        names = tuple(n for n in chart.names if n in set(names))
        frame = tuple({n: Fraction(1)} for n in names)
        return cls(chart, frame, names, True)


def pullback_form(omega: Union[SymplecticForm, Polynomial], locus: ConstraintLocus) -> Polynomial:
    form = omega.form if isinstance(omega, SymplecticForm) else as_form(omega)
    D = form.ctx
    kill = {}
    for z in locus.constrained:
        kill[z] = 0
        kill[D.partner[z]] = 0
    restricted = form.substitute(kill)
    return restricted.transfer(doubled(locus.chart))


def characteristic_distribution(i_omega: Polynomial):
    """Kernel of the pulled-back two-form, or ``"non-constant-rank"``."""
    i_omega = as_form(i_omega)
    chart = i_omega.ctx.base
    n = len(chart)
    mat = two_form_matrix(i_omega)
    if all(e.is_constant() for row in mat for e in row):
        rows = [[mat[a][b].constant_term() for a in range(n)] for b in range(n)]
        basis = _linalg.nullspace(rows, n) if n else []
        frame = tuple(
            {chart.names[a]: v[a] for a in range(n) if v[a]} for v in basis
        )
        aligned = all(len(v) == 1 and next(iter(v.values())) == 1 for v in frame)
        span = tuple(
            next(chart.names[a] for a in range(n) if v[a]) for v in basis
        )
        return CoordinateDistribution(chart, frame, span, aligned)
    try:
        _certified_inverse(chart, mat, bound=8)
    except (Degenerate, NondegeneracyUnverified):
        return NON_CONSTANT_RANK
    return CoordinateDistribution(chart, (), (), True)


def _invariant(g: Polynomial, dist: CoordinateDistribution) -> bool:
    for vec in dist.frame:
        acc = g.ctx.zero()
        for name, c in vec.items():
            acc = acc + partial_derivative(g, name).scale(c)
        if acc:
            return False
    return True


def is_reducible(f: Polynomial, locus: ConstraintLocus, dist: CoordinateDistribution) -> bool:
    return _invariant(locus.restrict(f), dist)


def is_strongly_reducible(f: Polynomial, locus: ConstraintLocus, omega: SymplecticForm) -> bool:
    """The Hamiltonian field of ``f`` is tangent to the locus."""
    X = hamiltonian_vector_field(f, omega)
    return all(not locus.restrict(X.component(z)) for z in locus.constrained)


def reduced_chart(locus: ConstraintLocus, dist: CoordinateDistribution) -> GradingContext:
    if not dist.aligned:
        raise NotReducible("distribution is not spanned by coordinate directions")
    return locus.chart.subcontext(n for n in locus.retained if n not in dist.span)


def reduced_form(omega: SymplecticForm, locus: ConstraintLocus, dist: CoordinateDistribution) -> SymplecticForm:
    """The symplectic form on the leaf space whose pullback is ``i* omega``."""
    target = reduced_chart(locus, dist)
    pulled = pullback_form(omega, locus)
    D = pulled.ctx
    if any(partial_derivative(pulled, n) or partial_derivative(pulled, D.partner[n]) for n in dist.span):
        raise NotReducible("the pulled-back form is not basic")
    return check_symplectic(pulled.transfer(doubled(target)))


def reduce_function(f: Polynomial, locus: ConstraintLocus, dist: CoordinateDistribution) -> Polynomial:
    """The unique function on the leaf space pulling back to ``i* f``."""
    target = reduced_chart(locus, dist)
    g = locus.restrict(f)
    if not _invariant(g, dist):
        raise NotReducible(f"{f} is not invariant along {', '.join(dist.span)}")
    return g.transfer(target)


def reduced_bracket(
    f: Polynomial,
    g: Polynomial,
    locus: ConstraintLocus,
    omega: SymplecticForm,
    dist: CoordinateDistribution,
) -> Polynomial:
    """Bracket of the trivial extensions, restricted and pushed to the leaf space."""
    ambient = omega.base
    value = poisson_bracket(f.transfer(ambient), g.transfer(ambient), omega)
    try:
        return reduce_function(value, locus, dist)
    except NotReducible as exc:
        raise NotReducible(f"reduced bracket is not well defined: {exc}") from None


def poisson_bracket_of_bivector(pi: Bivector, f: Polynomial, g: Polynomial) -> Polynomial:
    """``{f, g} = sum pi^ij d_i f d_j g`` on the (ungraded) base."""
    out = pi.base.zero()
    for (i, j), v in pi.entries.items():
        a = partial_derivative(f, i)
        b = partial_derivative(g, j)
        if a and b:
            out = out + multiply(v, multiply(a, b))
    return out


@dataclass
class PoissonReductionReport:
    cond1: bool
    cond2: bool
    degree_bound: int
    family_size: int
    failures: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.cond1 and self.cond2


def _monomials(ctx: GradingContext, names: Sequence[str], bound: int):
    gens = [ctx.gen(n) for n in names]
    out = []
    for d in range(1, bound + 1):
        for combo in combinations_with_replacement(range(len(gens)), d):
            m = ctx.one()
            for i in combo:
                m = multiply(m, gens[i])
            out.append(m)
    return out


def poisson_reduction_conditions(
    pi: Bivector,
    constrained: Sequence[str],
    distribution: Sequence[str],
    degree_bound: int = 3,
) -> PoissonReductionReport:
    """Check the two reducibility conditions for ``(C, B)``.

    Condition 2 is tested on the B-invariant coordinate monomials of degree at
    most ``degree_bound`` together with constraint multiples of them; the
    bound is part of the report because it is not a proof over all functions.
    """
    base = pi.base
    locus = ConstraintLocus(base, tuple(constrained))
    dist = CoordinateDistribution.from_coordinates(locus.chart, distribution)
    failures = []
    allowed = set(distribution)
    cond1 = True
    for y in constrained:
        for j in base.names:
            if j in allowed:
                continue
            if locus.restrict(pi(y, j)):
                cond1 = False
                failures.append(("cond1", y, j))
    invariant = [n for n in locus.retained if n not in allowed]
    family = _monomials(base, invariant, degree_bound)
    for y in constrained:
        yg = base.gen(y)
        family.append(yg)
        family.extend(multiply(yg, m) for m in _monomials(base, invariant, degree_bound - 1))
    cond2 = True
    for a in range(len(family)):
        for b in range(a + 1, len(family)):
            h = poisson_bracket_of_bivector(pi, family[a], family[b])
            if not _invariant(locus.restrict(h), dist):
                cond2 = False
                failures.append(("cond2", str(family[a]), str(family[b])))
    return PoissonReductionReport(cond1, cond2, degree_bound, len(family), failures)

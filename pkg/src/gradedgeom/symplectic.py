"""Graded symplectic forms, Hamiltonian fields and the graded Poisson bracket.

Sign conventions used throughout:

* the coefficient matrix of a two-form is ``M[a][b]`` = coefficient of ``D[b]``
  in ``iota_{d/dz^a} omega``, so ``omega = 1/2 sum D[z^a] M[a][b] D[z^b]``;
* ``X_f`` is the unique field with ``iota_{X_f} omega = df``;
* ``{f, g} = (-1)^{|f|+1} X_f(g)``.

On the degree 1 Darboux chart ``omega = D[p] D[x]`` this gives ``X_x = d/dp``
and ``{x, p} = -1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import _linalg
from .core import (
    NONHOMOGENEOUS,
    ZERO,
    ContextMismatch,
    DegreeMismatch,
    GradedError,
    GradingContext,
    Polynomial,
    degree_of,
    multiply,
)
from .derivations import GradedVectorField, apply, euler_field
from .forms import (
    DoubledContext,
    as_form,
    contract,
    de_rham,
    degree_of_form,
    doubled,
    form_degree,
    lie_derivative,
    to_base,
)

__all__ = [
    "NotClosed",
    "NotHomogeneous",
    "Degenerate",
    "NondegeneracyUnverified",
    "NotSymplecticField",
    "SymplecticForm",
    "MasterEquationResult",
    "two_form_matrix",
    "two_form_from_matrix",
    "check_symplectic",
    "liouville_potential",
    "hamiltonian_vector_field",
    "hamiltonian_of_field",
    "poisson_bracket",
    "check_master_equation",
    "darboux_form",
]


class NotClosed(GradedError):
    def __init__(self, witness: Polynomial):
        super().__init__(f"two-form is not closed: d(omega) = {witness}")
        self.witness = witness


class NotHomogeneous(GradedError):
    pass


class Degenerate(GradedError):
    pass


class NondegeneracyUnverified(GradedError):
    """Raised when no polynomial inverse could be certified within the bound."""


class NotSymplecticField(GradedError):
    def __init__(self, witness: Polynomial):
        super().__init__(f"L_X omega = {witness} is not zero")
        self.witness = witness


def two_form_matrix(omega: Polynomial) -> list[list[Polynomial]]:
    """Coefficient matrix of a two-form, indexed by base chart order."""
    omega = as_form(omega)
    ctx = omega.ctx
    base = ctx.base
    nb = len(base)
    if omega and form_degree(omega) != 2:
        raise DegreeMismatch("expected a two-form")
    from .derivations import partial_derivative

    mat = [[base.zero() for _ in range(nb)] for _ in range(nb)]
    for a, name in enumerate(base.names):
        inner = partial_derivative(omega, ctx.partner[name])
        rows: list[dict] = [dict() for _ in range(nb)]
        for mono, c in inner._terms.items():
            b = next(i for i in range(nb) if mono[nb + i])
            rows[b][mono[:nb]] = c
        for b in range(nb):
            if rows[b]:
                mat[a][b] = Polynomial(base, rows[b])
    return mat


def two_form_from_matrix(ctx: DoubledContext, mat: list[list[Polynomial]]) -> Polynomial:
    out = ctx.zero()
    names = ctx.base.names
    for a, row in enumerate(mat):
        for b, entry in enumerate(row):
            if entry:
                out = out + multiply(
                    multiply(ctx.d_gen(names[a]), as_form(entry)), ctx.d_gen(names[b])
                )
    return out.scale(Fraction(1, 2))


def _split_body(base: GradingContext, entry: Polynomial):
    body, soul = {}, {}
    for mono, c in entry._terms.items():
        if all(e == 0 or d == 0 for e, d in zip(mono, base.degrees)):
            body[mono] = c
        else:
            soul[mono] = c
    return Polynomial(base, body), Polynomial(base, soul)


def _certified_inverse(base: GradingContext, mat, bound: int):
    """Left inverse of ``mat`` or an exception explaining why there is none.

    The matrix splits as ``B + N`` where ``B`` only involves degree 0
    coordinates.  ``B`` is inverted by its adjugate when its determinant is a
    nonzero rational; ``(I + B^-1 N)^-1`` is then a finite Neumann series,
    which must vanish by order ``bound``.
    """
    n = len(mat)
    if n == 0:
        return []
    body = [[_split_body(base, e)[0] for e in row] for row in mat]
    soul = [[_split_body(base, e)[1] for e in row] for row in mat]
    det = _linalg.poly_det(base, body)
    if not det or det.constant_term() == 0:
        raise Degenerate("the coefficient matrix is singular at the origin")
    if not det.is_constant():
        raise NondegeneracyUnverified(
            f"body determinant {det} is not a unit of the polynomial ring"
        )
    inv_det = 1 / det.constant_term()
    adj = _linalg.poly_adjugate(base, body)
    body_inv = [[e.scale(inv_det) for e in row] for row in adj]
    step = _linalg.mat_mul(base, body_inv, soul)
    step = [[-e for e in row] for row in step]
    total = [[base.one() if i == j else base.zero() for j in range(n)] for i in range(n)]
    power = total
    for order in range(1, bound + 2):
        power = _linalg.mat_mul(base, power, step)
        if all(not e for row in power for e in row):
            break
        if order > bound:
            raise NondegeneracyUnverified(
                f"Neumann series did not terminate within order {bound}"
            )
        total = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(total, power)]
    inverse = _linalg.mat_mul(base, total, body_inv)
    if not _linalg.is_identity(_linalg.mat_mul(base, inverse, mat)):
        raise NondegeneracyUnverified("candidate inverse failed verification")
    if not _linalg.is_identity(_linalg.mat_mul(base, mat, inverse)):
        raise NondegeneracyUnverified("candidate inverse failed verification")
    return inverse


@dataclass(frozen=True, eq=False)
class SymplecticForm:
    """A certified graded symplectic form of degree ``k``."""

    form: Polynomial
    k: int
    matrix: tuple
    inverse: tuple
    certificate: str

    @property
    def ctx(self) -> DoubledContext:
        return self.form.ctx

    @property
    def base(self) -> GradingContext:
        return self.form.ctx.base


def check_symplectic(omega: Polynomial, neumann_bound: int = 8) -> SymplecticForm:
    omega = as_form(omega)
    if not omega:
        if len(omega.ctx.base) == 0:
            return SymplecticForm(omega, 0, (), (), "darboux")
        raise Degenerate("the zero form is degenerate")
    if form_degree(omega) != 2:
        raise DegreeMismatch("a symplectic form must be a two-form")
    k = degree_of_form(omega)
    if k == NONHOMOGENEOUS:
        raise NotHomogeneous("two-form is not homogeneous")
    closure = de_rham(omega)
    if closure:
        raise NotClosed(closure)
    base = omega.ctx.base
    mat = two_form_matrix(omega)
    inverse = _certified_inverse(base, mat, neumann_bound)
    constant = all(e.is_constant() for row in mat for e in row)
    return SymplecticForm(
        omega,
        k,
        tuple(tuple(r) for r in mat),
        tuple(tuple(r) for r in inverse),
        "darboux" if constant else "polynomial",
    )


def darboux_form(ctx: GradingContext, pairs) -> Polynomial:
    """``sum D[p] D[x]`` over the given ``(x, p)`` name pairs."""
    D = doubled(ctx)
    out = D.zero()
    for x, p in pairs:
        out = out + multiply(D.d_gen(p), D.d_gen(x))
    return out


def liouville_potential(omega: SymplecticForm) -> Polynomial:
    """The one-form ``iota_E omega / k``; its differential is ``omega``."""
    if omega.k == 0:
        raise DegreeMismatch("degree 0 symplectic forms need not be exact")
    E = euler_field(omega.base)
    alpha = contract(E, omega.form).scale(Fraction(1, omega.k))
    if de_rham(alpha) != omega.form:
        raise GradedError("Liouville potential failed verification")
    return alpha


def _one_form_coefficients(theta: Polynomial) -> list[Polynomial]:
    ctx = theta.ctx
    base = ctx.base
    nb = len(base)
    rows: list[dict] = [dict() for _ in range(nb)]
    for mono, c in theta._terms.items():
        hits = [i for i in range(nb) if mono[nb + i]]
        if len(hits) != 1 or mono[nb + hits[0]] != 1:
            raise DegreeMismatch("expected a one-form")
        rows[hits[0]][mono[:nb]] = c
    return [Polynomial(base, r) for r in rows]


def _base_of(f: Polynomial, omega: SymplecticForm) -> Polynomial:
    if isinstance(f.ctx, DoubledContext):
        f = to_base(f)
    if f.ctx != omega.base:
        raise ContextMismatch("function is not on the chart of the symplectic form")
    return f


def hamiltonian_vector_field(f: Polynomial, omega: SymplecticForm) -> GradedVectorField:
    f = _base_of(f, omega)
    d = degree_of(f)
    base = omega.base
    if d == ZERO:
        return GradedVectorField.zero(base, -omega.k)
    if d == NONHOMOGENEOUS:
        raise DegreeMismatch("Hamiltonian must be homogeneous")
    df = de_rham(f)
    r = _one_form_coefficients(df) if df else [base.zero()] * len(base)
    comps = {}
    for c, name in enumerate(base.names):
        acc = base.zero()
        for b in range(len(base)):
            if r[b] and omega.inverse[b][c]:
                acc = acc + multiply(r[b], omega.inverse[b][c])
        comps[name] = acc
    X = GradedVectorField(base, comps, d - omega.k)
    if contract(X, omega.form) != df:
        raise GradedError("Hamiltonian vector field failed verification")
    return X


def hamiltonian_of_field(X: GradedVectorField, omega: SymplecticForm) -> Polynomial:
    """A function ``H`` with ``iota_X omega = dH`` for a symplectic field ``X``.

    Uses ``H = iota_E iota_X omega / (k + l)``; requires ``k + l != 0``.
    """
    if X.ctx != omega.base:
        raise ContextMismatch("field is not on the chart of the symplectic form")
    lie = lie_derivative(X, omega.form)
    if lie:
        raise NotSymplecticField(lie)
    weight = omega.k + X.degree
    if X.is_zero():
        return omega.base.zero()
    if weight == 0:
        raise DegreeMismatch("k + deg X = 0: the Euler argument does not apply")
    E = euler_field(omega.base)
    inner = contract(X, omega.form)
    H = to_base(contract(E, inner)).scale(Fraction(1, weight))
    if de_rham(H) != inner:
        raise GradedError("Hamiltonian failed verification")
    return H


def poisson_bracket(f: Polynomial, g: Polynomial, omega: SymplecticForm) -> Polynomial:
    f = _base_of(f, omega)
    g = _base_of(g, omega)
    d = degree_of(f)
    if d == ZERO:
        return omega.base.zero()
    if d == NONHOMOGENEOUS:
        raise DegreeMismatch("first bracket argument must be homogeneous")
    value = apply(hamiltonian_vector_field(f, omega), g)
    return value if (d + 1) % 2 == 0 else -value


@dataclass
class MasterEquationResult:
    ok: bool
    bracket: Polynomial
    k: int
    expected_degree: int
    bracket_is_constant: bool
    q_squares_to_zero: bool
    notes: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    @property
    def witness(self) -> Optional[Polynomial]:
        return None if self.ok else self.bracket


def check_master_equation(S: Polynomial, omega: SymplecticForm) -> MasterEquationResult:
    S = _base_of(S, omega)
    d = degree_of(S)
    if d not in (ZERO, omega.k + 1):
        raise DegreeMismatch(f"S has degree {d}; expected {omega.k + 1}")
    bracket = poisson_bracket(S, S, omega)
    const = bracket.is_constant()
    notes = [f"deg {{S,S}} = k + 2 = {omega.k + 2}"]
    if const and bracket and omega.k == -2:
        notes.append("k = -2: {S,S} is a nonzero constant, so [Q,Q] = 0 still holds")
    return MasterEquationResult(
        ok=not bracket,
        bracket=bracket,
        k=omega.k,
        expected_degree=omega.k + 2,
        bracket_is_constant=const,
        q_squares_to_zero=const,
        notes=notes,
    )

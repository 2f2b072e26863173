"""Classical structures encoded as cohomological fields or master-equation Hamiltonians.

* Lie algebras: Chevalley-Eilenberg field ``1/2 f_ij^k x^i x^j d/dx^k``.
* Lie algebroids: ``-rho^i_a a^a d/dx^i + 1/2 f_ab^c a^a a^b d/da^c``.  The
  overall sign is chosen so that a zero anchor gives exactly the Lie algebra
  field; the relative sign makes the anchor a bracket morphism.
* L-infinity algebras truncated at finite arity.
* Poisson bivectors: ``S = 1/2 pi^ij(x) p_i p_j`` on ``T*[1]M``.
* Courant algebroids: ``S = rho^i_a p_i xi^a + 1/6 f_abc xi^a xi^b xi^c`` on the
  degree 2 chart with ``omega = sum dp dx + 1/2 sum d(g xi) d xi``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Mapping, Optional, Sequence

from .core import (
    ZERO,
    DegreeMismatch,
    GradedError,
    GradingContext,
    Polynomial,
    degree_of,
    multiply,
)
from .derivations import CheckResult, GradedVectorField, commutator, is_cohomological
from .forms import de_rham, doubled
from .symplectic import (
    MasterEquationResult,
    SymplecticForm,
    check_master_equation,
    check_symplectic,
    poisson_bracket,
)

__all__ = [
    "StructureError",
    "LieStructure",
    "AlgebroidStructure",
    "LInfinityTruncation",
    "LInfinityReport",
    "Bivector",
    "CourantStructure",
    "GeneralizedComplexResult",
    "lie_to_Q",
    "verify_lie",
    "algebroid_to_Q",
    "verify_algebroid",
    "linf_truncated_to_Q",
    "poisson_to_S",
    "verify_poisson",
    "courant_to_S",
    "verify_courant",
    "PointCourantResult",
    "verify_point_courant",
    "check_generalized_complex",
]


class StructureError(GradedError, ValueError):
    """Structure data violates a defining invariant."""


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class LieStructure:
    """Structure constants ``[e_i, e_j] = sum_k f[(i, j, k)] e_k`` (0-based)."""

    dimension: int
    constants: Mapping[tuple[int, int, int], Fraction]
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        n = self.dimension
        consts = {}
        for (i, j, k), v in self.constants.items():
            if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
                raise StructureError(f"index out of range in f[{i},{j},{k}]")
            v = _frac(v)
            if v:
                consts[(i, j, k)] = v
        for (i, j, k), v in consts.items():
            if consts.get((j, i, k), 0) != -v:
                raise StructureError(f"constants are not antisymmetric at ({i},{j},{k})")
        object.__setattr__(self, "constants", consts)
        names = self.names or tuple(f"x{i + 1}" for i in range(n))
        if len(names) != n:
            raise StructureError("one coordinate name per basis element is required")
        object.__setattr__(self, "names", tuple(names))

    @classmethod
    def from_brackets(cls, n: int, brackets: Mapping[tuple[int, int], Mapping[int, Fraction]], names=None):
        """Fill ``[e_j, e_i] = -[e_i, e_j]`` from the listed brackets."""
        consts: dict = {}
        for (i, j), rhs in brackets.items():
            for k, v in rhs.items():
                v = _frac(v)
                for key, val in (((i, j, k), v), ((j, i, k), -v)):
                    if consts.get(key, val) != val:
                        raise StructureError(f"conflicting entries for bracket ({i},{j})")
                    consts[key] = val
        return cls(n, consts, names)

    def chart(self) -> GradingContext:
        return GradingContext((name, 1) for name in self.names)


def lie_to_Q(L: LieStructure) -> GradedVectorField:
    ctx = L.chart()
    n = L.dimension
    # x^i x^j with i > j equals -x^j x^i, so each unordered pair contributes f_ij^k once
    rows: list[dict] = [dict() for _ in range(n)]
    for (i, j, k), v in L.constants.items():
        if i < j:
            mono = tuple(1 if t in (i, j) else 0 for t in range(n))
            rows[k][mono] = v
    comps = {L.names[k]: Polynomial(ctx, r) for k, r in enumerate(rows) if r}
    return GradedVectorField(ctx, comps, 1)


def verify_lie(L: LieStructure) -> CheckResult:
    """``[Q, Q] = 0`` for the CE field; the witness names a violating triple."""
    result = is_cohomological(lie_to_Q(L))
    if not result.ok and result.witness is not None:
        mono = result.witness.items()[0][0]
        triple = tuple(i for i, e in enumerate(mono) if e)
        result.details["triple"] = triple
    return result


@dataclass(frozen=True)
class AlgebroidStructure:
    """Anchor ``rho[(a, i)]`` and bracket ``f[(a, b, c)]`` as base polynomials."""

    base: tuple[str, ...]
    fibers: tuple[str, ...]
    anchor: Mapping[tuple[int, int], Polynomial]
    bracket: Mapping[tuple[int, int, int], Polynomial]

    def chart(self) -> GradingContext:
        return GradingContext([(n, 0) for n in self.base] + [(n, 1) for n in self.fibers])

    def __post_init__(self):
        ctx = self.chart()
        base_ctx = GradingContext((n, 0) for n in self.base)

        def lift(v):
            if isinstance(v, (int, Fraction)):
                return ctx.const(v)
            if v.ctx == base_ctx:
                return v.transfer(ctx)
            if v.ctx != ctx or not v.variables() <= set(self.base):
                raise StructureError("anchor and bracket entries must be functions on the base")
            return v

        anchor = {key: lift(v) for key, v in self.anchor.items() if lift(v)}
        bracket = {key: lift(v) for key, v in self.bracket.items() if lift(v)}
        for (a, b, c), v in bracket.items():
            other = bracket.get((b, a, c), ctx.zero())
            if other != -v:
                raise StructureError(f"bracket is not antisymmetric at ({a},{b},{c})")
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "bracket", bracket)


def algebroid_to_Q(A: AlgebroidStructure) -> GradedVectorField:
    ctx = A.chart()
    comps: dict[str, Polynomial] = {}
    fiber = [ctx.gen(n) for n in A.fibers]
    for (a, i), rho in A.anchor.items():
        name = A.base[i]
        comps[name] = comps.get(name, ctx.zero()) - multiply(rho, fiber[a])
    for (a, b, c), f in A.bracket.items():
        name = A.fibers[c]
        term = multiply(f, multiply(fiber[a], fiber[b])).scale(Fraction(1, 2))
        comps[name] = comps.get(name, ctx.zero()) + term
    return GradedVectorField(ctx, comps, 1)


def verify_algebroid(A: AlgebroidStructure) -> CheckResult:
    return is_cohomological(algebroid_to_Q(A))


def _koszul_sort_sign(ctx: GradingContext, idx: Sequence[int]) -> int:
    """Sign of sorting generator indices under graded commutativity."""
    sign = 1
    idx = list(idx)
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                if ctx.odd[idx[j]] and ctx.odd[idx[j + 1]]:
                    sign = -sign
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
    return sign


@dataclass
class LInfinityReport:
    ok: bool
    violated_arities: list
    residues: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


class LInfinityTruncation:
    """Multibrackets ``l_1 .. l_N`` on a graded chart, as the pieces ``Q_m`` of a field.

    ``brackets[m][(k, (i_1, .., i_m))]`` is the constant in
    ``Q_m^k = 1/m! sum c x^{i_1} .. x^{i_m}`` (names or indices accepted).
    Missing permutations are filled in by graded symmetry.
    """

    def __init__(self, ctx: GradingContext, brackets: Mapping[int, Mapping]):
        self.ctx = ctx
        self.pieces: dict[int, GradedVectorField] = {}
        for m, table in sorted(brackets.items()):
            if m < 1:
                raise StructureError("arity must be positive")
            full: dict = {}
            for (k, inputs), v in table.items():
                k = ctx.index(k) if isinstance(k, str) else k
                inputs = tuple(ctx.index(i) if isinstance(i, str) else i for i in inputs)
                if len(inputs) != m:
                    raise StructureError(f"arity {m} entry has {len(inputs)} inputs")
                expected = ctx.degrees[k] + 1
                if sum(ctx.degrees[i] for i in inputs) != expected:
                    raise StructureError(
                        f"inconsistent degrees: l_{m} entry into {ctx.names[k]} must have input degree {expected}"
                    )
                v = _frac(v)
                for perm in set(permutations(range(m))):
                    permuted = tuple(inputs[p] for p in perm)
                    sign = _koszul_sort_sign(ctx, permuted) * _koszul_sort_sign(ctx, inputs)
                    key = (k, permuted)
                    val = v * sign
                    if any(ctx.odd[i] and permuted.count(i) > 1 for i in permuted):
                        val = Fraction(0)
                    if key in full and full[key] != val:
                        raise StructureError(f"entries of l_{m} violate graded symmetry")
                    full[key] = val
            comps: dict[str, Polynomial] = {}
            for (k, inputs), v in full.items():
                if not v:
                    continue
                mono = ctx.one()
                for i in inputs:
                    mono = multiply(mono, ctx.gen(ctx.names[i]))
                name = ctx.names[k]
                comps[name] = comps.get(name, ctx.zero()) + mono.scale(v / factorial(m))
            self.pieces[m] = GradedVectorField(ctx, comps, 1)

    @classmethod
    def from_fields(cls, ctx: GradingContext, pieces: Mapping[int, GradedVectorField]):
        obj = cls(ctx, {})
        for m, Q in pieces.items():
            if Q.degree != 1:
                raise StructureError("every Q_m must have degree 1")
            for comp in Q.components.values():
                if any(sum(mono) != m for mono in comp._terms):
                    raise StructureError(f"Q_{m} has a component of the wrong arity")
            obj.pieces[m] = Q
        return obj

    def field(self) -> GradedVectorField:
        total = GradedVectorField.zero(self.ctx, 1)
        for Q in self.pieces.values():
            total = total + Q
        return total


def linf_truncated_to_Q(T: LInfinityTruncation):
    """The field ``Q = sum Q_m`` and the arity-graded pieces of ``[Q, Q]``."""
    Q = T.field()
    square = commutator(Q, Q)
    residues: dict[int, dict[str, Polynomial]] = {}
    for name, comp in square.components.items():
        for mono, c in comp._terms.items():
            r = sum(mono)
            bucket = residues.setdefault(r, {})
            prev = bucket.get(name, T.ctx.zero())
            bucket[name] = prev + Polynomial(T.ctx, {mono: c})
    violated = sorted(r for r, comps in residues.items() if any(comps.values()))
    return Q, LInfinityReport(not violated, violated, residues)


@dataclass(frozen=True)
class Bivector:
    """``pi[(i, j)]`` on degree 0 coordinates; ``pi[(j, i)] = -pi[(i, j)]`` is implied."""

    base: GradingContext
    entries: Mapping[tuple[str, str], Polynomial]

    def __post_init__(self):
        if any(d != 0 for d in self.base.degrees):
            raise StructureError("bivectors live on a chart of degree 0 coordinates")
        full: dict = {}
        for (i, j), v in self.entries.items():
            if isinstance(v, (int, Fraction)):
                v = self.base.const(v)
            if i == j and v:
                raise StructureError("diagonal entries of a bivector vanish")
            for key, val in (((i, j), v), ((j, i), -v)):
                if key in full and full[key] != val:
                    raise StructureError(f"bivector entries ({i},{j}) are not antisymmetric")
                full[key] = val
        object.__setattr__(self, "entries", {k: v for k, v in full.items() if v})

    def __call__(self, i: str, j: str) -> Polynomial:
        return self.entries.get((i, j), self.base.zero())

    def momentum(self, name: str) -> str:
        return f"p_{name}"

    def cotangent_chart(self) -> GradingContext:
        return self.base.extend((self.momentum(n), 1) for n in self.base.names)


def poisson_to_S(pi: Bivector) -> tuple[SymplecticForm, Polynomial]:
    from .symplectic import darboux_form

    ctx = pi.cotangent_chart()
    omega = check_symplectic(darboux_form(ctx, [(n, pi.momentum(n)) for n in pi.base.names]))
    S = ctx.zero()
    for (i, j), v in pi.entries.items():
        term = multiply(v.transfer(ctx), multiply(ctx.gen(pi.momentum(i)), ctx.gen(pi.momentum(j))))
        S = S + term.scale(Fraction(1, 2))
    return omega, S


def verify_poisson(pi: Bivector) -> MasterEquationResult:
    omega, S = poisson_to_S(pi)
    return check_master_equation(S, omega)


@dataclass(frozen=True)
class CourantStructure:
    """Local Courant data on the degree 2 chart ``(x : 0, xi : 1, p : 2)``.

    ``pairing[(a, b)]``, ``anchor[(a, i)]`` and ``f[(a, b, c)]`` are functions of
    the base coordinates; missing symmetric/antisymmetric entries are filled in.
    """

    base: tuple[str, ...]
    fibers: tuple[str, ...]
    pairing: Mapping[tuple[int, int], object]
    anchor: Mapping[tuple[int, int], object] = field(default_factory=dict)
    f: Mapping[tuple[int, int, int], object] = field(default_factory=dict)
    momenta: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        momenta = self.momenta or tuple(f"p_{n}" for n in self.base)
        if len(momenta) != len(self.base):
            raise StructureError("one momentum per base coordinate is required")
        object.__setattr__(self, "momenta", tuple(momenta))
        base_ctx = GradingContext((n, 0) for n in self.base)
        ctx = self.chart()

        def lift(v):
            if isinstance(v, (int, Fraction)):
                return ctx.const(v)
            if v.ctx == base_ctx:
                return v.transfer(ctx)
            if v.ctx == ctx and v.variables() <= set(self.base):
                return v
            raise StructureError("Courant data must be functions of the base coordinates")

        g: dict = {}
        for (a, b), v in self.pairing.items():
            v = lift(v)
            for key in ((a, b), (b, a)):
                if key in g and g[key] != v:
                    raise StructureError("pairing is not symmetric")
                g[key] = v
        n = len(self.fibers)
        from . import _linalg

        const = [[g.get((a, b), ctx.zero()).constant_term() for b in range(n)] for a in range(n)]
        if _linalg.rank(const) != n:
            raise StructureError("pairing is not invertible")
        f: dict = {}
        for (a, b, c), v in self.f.items():
            v = lift(v)
            for perm in permutations(range(3)):
                idx = (a, b, c)
                key = tuple(idx[p] for p in perm)
                sign = _perm_sign(perm)
                val = v if sign > 0 else -v
                if len(set(key)) < 3 and val:
                    raise StructureError("f must be totally antisymmetric")
                if key in f and f[key] != val:
                    raise StructureError("f must be totally antisymmetric")
                f[key] = val
        object.__setattr__(self, "pairing", {k: v for k, v in g.items() if v})
        object.__setattr__(self, "anchor", {k: lift(v) for k, v in self.anchor.items() if lift(v)})
        object.__setattr__(self, "f", {k: v for k, v in f.items() if v})

    def chart(self) -> GradingContext:
        momenta = self.momenta or tuple(f"p_{n}" for n in self.base)
        return GradingContext(
            [(n, 0) for n in self.base] + [(n, 1) for n in self.fibers] + [(n, 2) for n in momenta]
        )


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def courant_form(C: CourantStructure) -> Polynomial:
    ctx = C.chart()
    D = doubled(ctx)
    omega = D.zero()
    for x, p in zip(C.base, C.momenta):
        omega = omega + multiply(D.d_gen(p), D.d_gen(x))
    for (a, b), g in C.pairing.items():
        inner = de_rham(multiply(g, ctx.gen(C.fibers[a])))
        omega = omega + multiply(inner, D.d_gen(C.fibers[b])).scale(Fraction(1, 2))
    return omega


def courant_to_S(C: CourantStructure) -> tuple[SymplecticForm, Polynomial]:
    ctx = C.chart()
    omega = check_symplectic(courant_form(C))
    xi = [ctx.gen(n) for n in C.fibers]
    S = ctx.zero()
    for (a, i), rho in C.anchor.items():
        S = S + multiply(rho, multiply(ctx.gen(C.momenta[i]), xi[a]))
    for (a, b, c), v in C.f.items():
        S = S + multiply(v, multiply(multiply(xi[a], xi[b]), xi[c])).scale(Fraction(1, 6))
    return omega, S


def verify_courant(C: CourantStructure) -> MasterEquationResult:
    omega, S = courant_to_S(C)
    return check_master_equation(S, omega)


@dataclass
class PointCourantResult:
    """Verdict for a bracket tensor over a point with the pairing ``g = delta``."""

    ok: bool
    master: MasterEquationResult
    represented: bool
    mismatch: Optional[tuple[int, int]]

    def __bool__(self) -> bool:
        return self.ok


def verify_point_courant(f: Mapping[tuple[int, int, int], object], n: int) -> PointCourantResult:
    """Decide whether ``[e_a, e_b] = sum_c f[(a, b, c)] e_c`` with ``g = delta`` is Courant.

    ``f`` is an arbitrary tensor.  ``S = 1/6 f_abc xi^a xi^b xi^c`` only sees its
    totally antisymmetric part, so the bracket is accepted when ``{S, S} = 0``
    and the derived bracket ``-{{xi_a, S}, xi_b}`` reproduces ``f`` itself.
    """
    ctx = GradingContext((f"xi{a + 1}", 1) for a in range(n))
    D = doubled(ctx)
    form = D.zero()
    for a in range(n):
        form = form + multiply(D.d_gen(ctx.names[a]), D.d_gen(ctx.names[a]))
    omega = check_symplectic(form.scale(Fraction(1, 2)))
    xi = ctx.gens()
    S = ctx.zero()
    for (a, b, c), v in f.items():
        v = _frac(v)
        if v:
            S = S + multiply(multiply(xi[a], xi[b]), xi[c]).scale(v / 6)
    master = check_master_equation(S, omega)
    mismatch = None
    for a in range(n):
        inner = poisson_bracket(xi[a], S, omega)
        for b in range(n):
            derived = -poisson_bracket(inner, xi[b], omega) if inner else ctx.zero()
            expected = ctx.zero()
            for c in range(n):
                v = _frac(f.get((a, b, c), 0))
                if v:
                    expected = expected + xi[c].scale(v)
            if derived != expected:
                mismatch = (a, b)
                break
        if mismatch:
            break
    represented = mismatch is None
    return PointCourantResult(master.ok and represented, master, represented, mismatch)


@dataclass
class GeneralizedComplexResult:
    lam: Optional[Fraction]
    normalized: Optional[int]
    T: Polynomial
    double_bracket: Polynomial
    TT_zero: Optional[bool]
    two_parameter: Optional[Polynomial]
    ok: bool

    def __bool__(self) -> bool:
        return self.ok


def _proportionality(u: Polynomial, s: Polynomial) -> Optional[Fraction]:
    """``c`` with ``u = c s``, or ``None``."""
    if not s:
        return Fraction(0) if not u else None
    ratio = None
    for mono, c in s._terms.items():
        r = u._terms.get(mono, Fraction(0)) / c
        if ratio is None:
            ratio = r
        elif r != ratio:
            return None
    if u != s.scale(ratio):
        return None
    return ratio


def check_generalized_complex(S: Polynomial, J: Polynomial, omega: SymplecticForm) -> GeneralizedComplexResult:
    """Test ``{{S, J}, J} = lambda S`` and the two-parameter master equation.

    ``J`` must have degree 2 and must not involve degree 2 coordinates
    (the momenta).
    """
    ctx = omega.base
    for name, deg in ((("S", S), 3), (("J", J), 2)):
        d = degree_of(name[1])
        if d not in (ZERO, deg):
            raise DegreeMismatch(f"{name[0]} must have degree {deg}, got {d}")
    momenta = {n for n, d in ctx.coords if d == 2}
    if J.variables() & momenta:
        raise StructureError(f"J depends on momenta {sorted(J.variables() & momenta)}")
    T = poisson_bracket(S, J, omega)
    U = poisson_bracket(T, J, omega)
    lam = _proportionality(U, S)
    if lam is None:
        return GeneralizedComplexResult(None, None, T, U, None, None, False)
    normalized = (lam > 0) - (lam < 0)
    TT = poisson_bracket(T, T, omega)
    SS = poisson_bracket(S, S, omega)
    ST = poisson_bracket(S, T, omega) + poisson_bracket(T, S, omega)
    big = ctx.extend([("alpha", 0), ("beta", 0)])
    a, b = big.gen("alpha"), big.gen("beta")
    two = (
        multiply(a * a, SS.transfer(big))
        + multiply(a * b, ST.transfer(big))
        + multiply(b * b, TT.transfer(big))
    )
    return GeneralizedComplexResult(lam, normalized, T, U, not TT, two, not TT and not two)

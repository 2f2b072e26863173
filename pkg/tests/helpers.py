"""Random generators and independent oracles shared by the test modules.

The oracles deliberately avoid the library's own sign bookkeeping: products
are recomputed by bubble-sorting generator words, Jacobi identities by summing
structure constants, and Poisson brackets with sympy.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations

import sympy

from gradedgeom.core import GradingContext, Polynomial, declare_chart
from gradedgeom.derivations import GradedVectorField

NAMES = "abcdefgh"


def random_chart(rng: random.Random, n: int | None = None, lo: int = -2, hi: int = 3) -> GradingContext:
    n = n if n is not None else rng.randint(1, 5)
    return declare_chart((NAMES[i], rng.randint(lo, hi)) for i in range(n))


def random_word(rng: random.Random, ctx: GradingContext, length: int) -> list[int]:
    return [rng.randrange(len(ctx)) for _ in range(length)]


def word_value(ctx: GradingContext, word) -> tuple[tuple, int] | None:
    """Normal-order a product of generators by adjacent swaps.

    Returns ``(exponents, sign)`` or ``None`` when an odd generator repeats.
    """
    w = list(word)
    sign = 1
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                if ctx.odd[w[j]] and ctx.odd[w[j + 1]]:
                    sign = -sign
                w[j], w[j + 1] = w[j + 1], w[j]
    exps = [0] * len(ctx)
    for g in w:
        exps[g] += 1
    if any(e > 1 and ctx.odd[i] for i, e in enumerate(exps)):
        return None
    return tuple(exps), sign


def word_poly(ctx: GradingContext, word, coeff=1) -> Polynomial:
    """The product of generators in ``word`` built with the library multiply."""
    p = ctx.const(coeff)
    for g in word:
        p = p * ctx.gen(ctx.names[g])
    return p


def random_poly(rng: random.Random, ctx: GradingContext, terms: int = 3, max_len: int = 3,
                degree: int | None = None) -> Polynomial:
    """Sum of random words; with ``degree`` only words of that total degree."""
    p = ctx.zero()
    for _ in range(terms):
        for _attempt in range(20):
            word = random_word(rng, ctx, rng.randint(0, max_len))
            if degree is None or sum(ctx.degrees[g] for g in word) == degree:
                break
        else:
            continue
        p = p + word_poly(ctx, word, rng.choice([-2, -1, 1, 2, Fraction(1, 2)]))
    return p


def random_field(rng: random.Random, ctx: GradingContext, degree: int, terms: int = 2) -> GradedVectorField:
    comps = {}
    for name, deg in ctx.coords:
        comps[name] = random_poly(rng, ctx, terms, 3, degree=deg + degree)
    return GradedVectorField(ctx, comps, degree)


def jacobi_oracle(n: int, f) -> bool:
    """Brute-force Jacobi for ``[e_i, e_j] = sum_k f[i][j][k] e_k``."""
    for i in range(n):
        for j in range(n):
            for l in range(n):
                for m in range(n):
                    s = 0
                    for k in range(n):
                        s += f[i][j][k] * f[k][l][m] + f[j][l][k] * f[k][i][m] + f[l][i][k] * f[k][j][m]
                    if s:
                        return False
    return True


def antisymmetric(n: int, f) -> bool:
    return all(f[i][j][k] == -f[j][i][k] for i in range(n) for j in range(n) for k in range(n))


def totally_antisymmetric(n: int, f) -> bool:
    idx = range(n)
    for a in idx:
        for b in idx:
            for c in idx:
                v = f[a][b][c]
                for perm in permutations(range(3)):
                    t = (a, b, c)
                    key = tuple(t[p] for p in perm)
                    inv = sum(1 for x in range(3) for y in range(x + 1, 3) if perm[x] > perm[y])
                    expected = v if inv % 2 == 0 else -v
                    if f[key[0]][key[1]][key[2]] != expected:
                        return False
    return True


def sympy_poisson_jacobi(names, entries) -> bool:
    """Jacobi of ``{x_i, x_j} = pi^ij`` by direct symbolic expansion."""
    xs = sympy.symbols(names)
    n = len(xs)
    pi = [[sympy.Integer(0)] * n for _ in range(n)]
    for (i, j), v in entries.items():
        pi[i][j] = v
        pi[j][i] = -v

    def bracket(f, g):
        return sympy.expand(sum(pi[i][j] * sympy.diff(f, xs[i]) * sympy.diff(g, xs[j])
                                for i in range(n) for j in range(n)))

    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                a, b, c = xs[i], xs[j], xs[k]
                total = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
                if sympy.expand(total) != 0:
                    return False
    return True


def to_sympy(p: Polynomial, symbols) -> sympy.Expr:
    """A polynomial on a chart of degree 0 coordinates as a sympy expression."""
    out = sympy.Integer(0)
    for mono, c in p.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(symbols, mono):
            term *= s ** e
        out += term
    return sympy.expand(out)


def from_sympy(expr, ctx: GradingContext) -> Polynomial:
    symbols = sympy.symbols(ctx.names)
    poly = sympy.Poly(sympy.expand(expr), *symbols)
    out = ctx.zero()
    for exps, c in poly.terms():
        c = sympy.Rational(c)
        out = out + ctx.monomial(dict(zip(ctx.names, exps)), Fraction(int(c.p), int(c.q)))
    return out


def random_reduction_case(rng: random.Random):
    """A Darboux chart, a coordinate constraint locus and a homogeneous function.

    Half of the functions avoid the conjugates of the constrained coordinates,
    which makes them strongly reducible; the rest are unrestricted.
    """
    from gradedgeom.symplectic import check_symplectic, darboux_form

    n = rng.randint(1, 3)
    k = rng.choice([1, 2])
    ctx = declare_chart([(f"x{i}", 0) for i in range(n)] + [(f"p{i}", k) for i in range(n)])
    omega = check_symplectic(darboux_form(ctx, [(f"x{i}", f"p{i}") for i in range(n)]))
    names = list(ctx.names)
    constrained = tuple(sorted(rng.sample(names, rng.randint(1, len(names) - 1)), key=names.index))
    conj = {f"x{i}": f"p{i}" for i in range(n)}
    conj.update({v: k_ for k_, v in conj.items()})
    if rng.random() < 0.5:
        allowed = [nm for nm in names if conj[nm] not in constrained]
        sub = ctx.subcontext(allowed) if allowed else None
        f = random_poly(rng, sub, 3, 3, degree=rng.randint(0, 4)).transfer(ctx) if sub else ctx.zero()
    else:
        f = random_poly(rng, ctx, 3, 3, degree=rng.randint(0, 4))
    return omega, constrained, f


# Example corpus shared by the unit and acceptance tests

def darboux(n: int = 1, k: int = 1):
    from gradedgeom.symplectic import check_symplectic, darboux_form

    tags = [""] if n == 1 else [str(i) for i in range(1, n + 1)]
    c = declare_chart([(f"x{t}", 0) for t in tags] + [(f"p{t}", k) for t in tags])
    return c, check_symplectic(darboux_form(c, [(f"x{t}", f"p{t}") for t in tags]))


def odd_line():
    """The chart x:1 with omega = dx dx."""
    from gradedgeom.forms import doubled
    from gradedgeom.symplectic import check_symplectic

    c = declare_chart([("x", 1)])
    D = doubled(c)
    return c, check_symplectic(D.gen("D[x]") * D.gen("D[x]"))


def pairing_with_polynomial_g():
    """Degree 2 pairing form with g = [[x, 1], [1, 0]], whose inverse is polynomial."""
    from gradedgeom.forms import de_rham, doubled
    from gradedgeom.symplectic import check_symplectic

    c = declare_chart([("x", 0), ("p", 2), ("xi1", 1), ("xi2", 1)])
    D = doubled(c)
    x, xi1, xi2 = D.gen("x"), D.gen("xi1"), D.gen("xi2")
    dxi1, dxi2 = D.gen("D[xi1]"), D.gen("D[xi2]")
    half = (de_rham(x * xi1) * dxi1 + de_rham(xi2) * dxi1 + de_rham(xi1) * dxi2).scale(Fraction(1, 2))
    return c, check_symplectic(D.gen("D[p]") * D.gen("D[x]") + half)


SYMPLECTIC_CORPUS = [darboux, odd_line, pairing_with_polynomial_g, lambda: darboux(2, 1), lambda: darboux(2, 2)]


def random_homogeneous(rng: random.Random, omega, lo: int = -1, hi: int = 4):
    for _ in range(30):
        f = random_poly(rng, omega.base, 3, 3, degree=rng.randint(lo, hi))
        if f and not f.is_constant():
            return f
    return None


def table(n: int, consts):
    f = [[[0] * n for _ in range(n)] for _ in range(n)]
    for (i, j, k), v in consts.items():
        f[i][j][k] = v
    return f


def random_bivector(rng: random.Random, n: int):
    """A random polynomial bivector with coefficient degree at most 2.

    Returns the bivector, the coordinate names and the entries as sympy
    expressions keyed by index pairs.
    """
    from gradedgeom.structures import Bivector

    base = declare_chart([(f"x{i + 1}", 0) for i in range(n)])
    gens = base.gens()

    def poly(max_deg=2):
        p = base.zero()
        for _ in range(rng.randint(0, 2)):
            m = base.const(rng.choice([-2, -1, 1, 2]))
            for _ in range(rng.randint(0, max_deg)):
                m = m * rng.choice(gens)
            p = p + m
        return p

    kind = rng.choice(["dense", "single", "linear", "constant"])
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    entries = {}
    if kind == "single":
        i, j = rng.choice(pairs)
        entries[(i, j)] = poly()
    elif kind == "constant":
        for i, j in pairs:
            entries[(i, j)] = base.const(rng.choice([-1, 0, 1]))
    elif kind == "linear":
        for i, j in pairs:
            entries[(i, j)] = sum((g.scale(rng.choice([-1, 0, 0, 1])) for g in gens), base.zero())
    else:
        for i, j in rng.sample(pairs, rng.randint(1, len(pairs))):
            entries[(i, j)] = poly()
    pi = Bivector(base, {(base.names[i], base.names[j]): v for (i, j), v in entries.items()})
    syms = sympy.symbols(base.names)
    sym_entries = {k: to_sympy(v, syms) for k, v in entries.items()}
    return pi, list(base.names), sym_entries


def lie_poisson_bivector():
    from gradedgeom.structures import Bivector

    base = declare_chart([("x1", 0), ("x2", 0), ("x3", 0)])
    x1, x2, x3 = base.gens()
    return Bivector(base, {("x1", "x2"): x3, ("x2", "x3"): x1, ("x3", "x1"): x2})


def psm_bivectors():
    from gradedgeom.structures import Bivector

    base = declare_chart([("x1", 0), ("x2", 0), ("x3", 0)])
    return {
        "zero": Bivector(base, {}),
        "constant": Bivector(base, {("x1", "x2"): 1, ("x2", "x3"): Fraction(-1, 2)}),
        "lie": lie_poisson_bivector(),
    }


def standard_gc(I=((0, -1), (1, 0))):
    """T + T* over R^2 and J built from the endomorphism I of the tangent plane."""
    from gradedgeom.structures import CourantStructure, courant_to_S

    C = CourantStructure(("x1", "x2"), ("e1", "e2", "t1", "t2"), {(0, 2): 1, (1, 3): 1},
                         anchor={(0, 0): 1, (1, 1): 1}, momenta=("p1", "p2"))
    omega, S = courant_to_S(C)
    ctx = omega.base
    J = ctx.zero()
    for i in range(2):
        for j in range(2):
            if I[i][j]:
                J = J + (ctx.gen(f"t{i + 1}") * ctx.gen(f"e{j + 1}")).scale(I[i][j])
    return omega, S, J


def marsden_ratiu():
    from gradedgeom.structures import Bivector

    base = declare_chart([("x1", 0), ("x2", 0), ("x3", 0), ("y", 0)])
    return base, Bivector(base, {("x1", "y"): 1, ("x2", "x3"): 1})


def field_chart(target: GradingContext, n: int) -> GradingContext:
    """Component chart rebuilt from the documented naming scheme."""
    coords = [(f"{a}({r})", d) for a, d in target.coords for r in range(n + 1)]
    coords += [(f"d{a}({r})", d + 1) for a, d in target.coords for r in range(n)]
    return GradingContext(coords)


def terms_as_poly(terms, ctx: GradingContext) -> Polynomial:
    out = ctx.zero()
    for t in terms:
        m = ctx.const(t.coefficient)
        for c, d in t.factors:
            m = m * ctx.gen(("d" if d else "") + c.symbol)
        out = out + m
    return out


def expected_psm_sector(pi, ctx: GradingContext, sign) -> Polynomial:
    """sign * eta_i dX^i + 1/2 pi^ij(X) eta_i eta_j in component form."""
    out = ctx.zero()
    for x in pi.base.names:
        out = out + (ctx.gen(f"p_{x}(1)") * ctx.gen(f"d{x}(0)")).scale(sign)
    for (i, j), v in pi.entries.items():
        coeff = ctx.zero()
        for mono, c in v.items():
            m = ctx.const(c)
            for nm, e in zip(pi.base.names, mono):
                for _ in range(e):
                    m = m * ctx.gen(f"{nm}(0)")
            coeff = coeff + m
        out = out + (coeff * ctx.gen(f"p_{i}(1)") * ctx.gen(f"p_{j}(1)")).scale(Fraction(1, 2))
    return out


def cs_target():
    """so(3) with the pairing 1/2 sum da da and Theta = a1 a2 a3."""
    from gradedgeom.forms import doubled
    from gradedgeom.symplectic import check_symplectic

    c = declare_chart([("a1", 1), ("a2", 1), ("a3", 1)])
    D = doubled(c)
    form = sum((D.gen(f"D[a{i}]") * D.gen(f"D[a{i}]") for i in (1, 2, 3)), D.zero())
    omega = check_symplectic(form.scale(Fraction(1, 2)))
    return omega, c.gen("a1") * c.gen("a2") * c.gen("a3")

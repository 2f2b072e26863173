import random

import pytest

from gradedgeom.core import declare_chart, degree_of
from gradedgeom.derivations import apply
from gradedgeom.forms import de_rham, doubled
from gradedgeom.reduction import (
    NON_CONSTANT_RANK,
    ConstraintLocus,
    CoordinateDistribution,
    NotReducible,
    characteristic_distribution,
    is_reducible,
    is_strongly_reducible,
    poisson_bracket_of_bivector,
    poisson_reduction_conditions,
    pullback_form,
    reduce_function,
    reduced_bracket,
    reduced_chart,
    reduced_form,
)
from gradedgeom.structures import Bivector, poisson_to_S
from gradedgeom.symplectic import (
    check_symplectic,
    darboux_form,
    hamiltonian_vector_field,
    poisson_bracket,
)
from helpers import marsden_ratiu, random_poly, random_reduction_case


def darboux2():
    c = declare_chart([("x1", 0), ("x2", 0), ("p1", 1), ("p2", 1)])
    return c, check_symplectic(darboux_form(c, [("x1", "p1"), ("x2", "p2")]))


def test_characteristic_distribution_of_momentum_constraint():
    c, w = darboux2()
    locus = ConstraintLocus(c, ("p2",))
    dist = characteristic_distribution(pullback_form(w, locus))
    assert dist.span == ("x2",) and dist.aligned
    assert reduced_chart(locus, dist).names == ("x1", "p1")


def test_reduced_bracket_example():
    c, w = darboux2()
    x1, x2, p1, p2 = c.gens()
    locus = ConstraintLocus(c, ("p2",))
    dist = characteristic_distribution(pullback_form(w, locus))
    assert reduce_function(x1 + x2 * p2, locus, dist) == reduced_chart(locus, dist).gen("x1")
    r = reduced_chart(locus, dist)
    ambient = reduce_function(poisson_bracket(x1, p1, w), locus, dist)
    assert reduced_bracket(r.gen("x1"), r.gen("p1"), locus, w, dist) == ambient == -r.one()
    assert reduced_bracket(r.gen("x1"), r.gen("x1"), locus, w, dist) == 0


def test_not_reducible():
    c, w = darboux2()
    locus = ConstraintLocus(c, ("p2",))
    dist = characteristic_distribution(pullback_form(w, locus))
    f = c.gen("x2")
    assert not is_reducible(f, locus, dist)
    with pytest.raises(NotReducible):
        reduce_function(f, locus, dist)


def test_full_rank_pullback_has_empty_kernel():
    c, w = darboux2()
    locus = ConstraintLocus(c, ("x2", "p2"))
    dist = characteristic_distribution(pullback_form(w, locus))
    assert dist.span == ()


def test_non_constant_rank_reported():
    c = declare_chart([("x", 0), ("y", 0), ("u", 0), ("v", 0)])
    D = doubled(c)
    form = D.gen("D[x]") * D.gen("D[y]") + D.gen("u") * D.gen("D[u]") * D.gen("D[v]")
    locus = ConstraintLocus(c, ("x",))
    assert characteristic_distribution(pullback_form(form, locus)) == NON_CONSTANT_RANK


def test_misaligned_distribution_not_reducible():
    c = declare_chart([("a", 0), ("b", 0), ("c", 0), ("d", 0)])
    D = doubled(c)
    # kernel spanned by d/da + d/db after killing nothing: a rank 2 form in (a - b, c, d) directions
    form = (D.gen("D[a]") - D.gen("D[b]")) * D.gen("D[c]")
    dist = characteristic_distribution(form)
    assert not dist.aligned
    with pytest.raises(NotReducible):
        reduced_chart(ConstraintLocus(c, ()), dist)


def test_strong_implies_reducible_sampled():
    rng = random.Random(8)
    strong = 0
    for _ in range(200):
        omega, constrained, f = random_reduction_case(rng)
        if not f or degree_of(f) == "nonhomogeneous":
            continue
        locus = ConstraintLocus(omega.base, constrained)
        dist = characteristic_distribution(pullback_form(omega, locus))
        if is_strongly_reducible(f, locus, omega):
            strong += 1
            assert is_reducible(f, locus, dist)
    assert strong >= 40


def test_pullback_of_differential():
    rng = random.Random(9)
    checked = 0
    for _ in range(200):
        omega, constrained, f = random_reduction_case(rng)
        if not f:
            continue
        locus = ConstraintLocus(omega.base, constrained)
        dist = characteristic_distribution(pullback_form(omega, locus))
        if not is_reducible(f, locus, dist):
            continue
        fr = reduce_function(f, locus, dist)
        assert de_rham(fr).transfer(doubled(locus.chart)) == pullback_form(de_rham(f), locus)
        checked += 1
    assert checked >= 40


def test_hamiltonian_field_of_reduced_function():
    rng = random.Random(10)
    checked = 0
    for _ in range(500):
        omega, constrained, f = random_reduction_case(rng)
        if not f or f.is_constant():
            continue
        locus = ConstraintLocus(omega.base, constrained)
        dist = characteristic_distribution(pullback_form(omega, locus))
        if not is_strongly_reducible(f, locus, omega):
            continue
        target = reduced_chart(locus, dist)
        if not len(target):
            continue
        wr = reduced_form(omega, locus, dist)
        fr = reduce_function(f, locus, dist)
        if fr.is_constant():
            continue
        Xf = hamiltonian_vector_field(f, omega)
        Xr = hamiltonian_vector_field(fr, wr)
        for g in target.gens():
            lhs = locus.restrict(apply(Xf, g.transfer(omega.base)))
            assert lhs == apply(Xr, g).transfer(locus.chart)
        checked += 1
    assert checked >= 20


def test_reduced_bracket_antisymmetric_and_jacobi():
    c = declare_chart([("x1", 0), ("x2", 0), ("x3", 0), ("p1", 1), ("p2", 1), ("p3", 1)])
    w = check_symplectic(darboux_form(c, [("x1", "p1"), ("x2", "p2"), ("x3", "p3")]))
    locus = ConstraintLocus(c, ("p3",))
    dist = characteristic_distribution(pullback_form(w, locus))
    r = reduced_chart(locus, dist)
    rng = random.Random(12)
    fams = [random_poly(rng, r, 2, 3, degree=d) for d in (0, 1, 1, 2) for _ in range(2)]
    fams = [f for f in fams if f and not f.is_constant()]

    def br(a, b):
        if not a or not b or a.is_constant():
            return r.zero()
        return reduced_bracket(a, b, locus, w, dist)

    for f in fams:
        for g in fams:
            sign = -1 if ((degree_of(f) - 1) * (degree_of(g) - 1)) % 2 else 1
            assert br(f, g) == br(g, f).scale(-sign)
            for h in fams[:3]:
                s = -1 if ((degree_of(f) - 1) * (degree_of(g) - 1)) % 2 else 1
                assert br(f, br(g, h)) == br(br(f, g), h) + br(g, br(f, h)).scale(s)


# Poisson reduction

def test_marsden_ratiu_conditions_and_bracket():
    base, pi = marsden_ratiu()
    report = poisson_reduction_conditions(pi, ("y",), ("x1",))
    assert report.cond1 and report.cond2 and report.degree_bound == 3
    locus = ConstraintLocus(base, ("y",))
    dist = CoordinateDistribution.from_coordinates(locus.chart, ("x1",))
    target = reduced_chart(locus, dist)
    assert target.names == ("x2", "x3")
    reduced_pi = Bivector(target, {("x2", "x3"): 1})
    rng = random.Random(13)
    for _ in range(40):
        f, g = random_poly(rng, target, 3, 3), random_poly(rng, target, 3, 3)
        direct = locus.restrict(poisson_bracket_of_bivector(pi, f.transfer(base), g.transfer(base)))
        assert reduce_function(direct.transfer(base), locus, dist) == poisson_bracket_of_bivector(reduced_pi, f, g)


def test_marsden_ratiu_graded_cross_check():
    base, pi = marsden_ratiu()
    omega, S = poisson_to_S(pi)
    locus = ConstraintLocus(omega.base, ("y", "p_x1"))
    dist = characteristic_distribution(pullback_form(omega, locus))
    assert set(dist.span) == {"x1", "p_y"}
    assert is_strongly_reducible(S, locus, omega)
    Sr = reduce_function(S, locus, dist)
    target = reduced_chart(locus, dist)
    assert Sr == target.gen("p_x2") * target.gen("p_x3")


def test_lie_poisson_condition_one_fails():
    base = declare_chart([("x1", 0), ("x2", 0), ("x3", 0)])
    x1, x2, x3 = base.gens()
    pi = Bivector(base, {("x1", "x2"): x3, ("x2", "x3"): x1, ("x3", "x1"): x2})
    report = poisson_reduction_conditions(pi, ("x1",), ())
    assert not report.cond1 and not report

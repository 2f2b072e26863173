import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gradedgeom.core import DegreeMismatch, declare_chart, degree_of
from gradedgeom.derivations import GradedVectorField, commutator
from gradedgeom.forms import contract, de_rham, doubled
from gradedgeom.symplectic import (
    Degenerate,
    NotClosed,
    NotSymplecticField,
    check_master_equation,
    check_symplectic,
    darboux_form,
    hamiltonian_of_field,
    hamiltonian_vector_field,
    liouville_potential,
    poisson_bracket,
    two_form_from_matrix,
    two_form_matrix,
)
from helpers import SYMPLECTIC_CORPUS as CORPUS
from helpers import darboux, odd_line, pairing_with_polynomial_g, random_homogeneous

seeds = st.integers(min_value=0, max_value=10**9)


def test_accepted_examples():
    _, w1 = darboux()
    assert (w1.k, w1.certificate) == (1, "darboux")
    _, w2 = odd_line()
    assert w2.k == 2
    _, w3 = pairing_with_polynomial_g()
    assert (w3.k, w3.certificate) == (2, "polynomial")


def test_rejections():
    c = declare_chart([("x", 0), ("p", 1)])
    D = doubled(c)
    with pytest.raises(Degenerate):
        check_symplectic(D.gen("x") * D.gen("D[p]") * D.gen("D[x]"))
    with pytest.raises(NotClosed) as err:
        check_symplectic(D.gen("p") * D.gen("D[p]") * D.gen("D[x]"))
    assert err.value.witness
    with pytest.raises(DegreeMismatch):
        check_symplectic(D.gen("D[x]"))


def test_liouville_examples():
    c, w = darboux()
    D = w.ctx
    assert liouville_potential(w) == D.gen("p") * D.gen("D[x]")
    c1, w1 = odd_line()
    alpha = liouville_potential(w1)
    assert de_rham(alpha) == w1.form
    assert alpha == doubled(c1).gen("x") * doubled(c1).gen("D[x]")


def test_liouville_needs_nonzero_k():
    c = declare_chart([("x", 0), ("y", 0)])
    w = check_symplectic(darboux_form(c, [("x", "y")]))
    assert w.k == 0
    with pytest.raises(DegreeMismatch):
        liouville_potential(w)


def test_hamiltonian_field_and_bracket_on_darboux():
    c, w = darboux()
    x, p = c.gens()
    assert hamiltonian_vector_field(x, w) == GradedVectorField(c, {"p": c.const(1)})
    assert poisson_bracket(x, p, w) == -1
    assert poisson_bracket(x, c.const(3), w) == 0
    assert hamiltonian_vector_field(c.const(5), w).is_zero()


def test_hamiltonian_of_field_examples():
    c, w = darboux()
    x, p = c.gens()
    # X_{xp} = x d/dx - p d/dp up to sign, degree 0, so k + l = 1
    X = hamiltonian_vector_field(x * p, w)
    assert hamiltonian_of_field(X, w) == x * p
    assert hamiltonian_of_field(GradedVectorField.zero(c, 0), w) == 0
    nonsymp = GradedVectorField(c, {"x": x})
    with pytest.raises(NotSymplecticField):
        hamiltonian_of_field(nonsymp, w)


def test_k_plus_l_zero_is_refused():
    c, w = darboux()
    X = GradedVectorField(c, {"p": c.const(1)})
    assert X == hamiltonian_vector_field(c.gen("x"), w)
    assert X.degree == -1 and w.k + X.degree == 0
    with pytest.raises(DegreeMismatch):
        hamiltonian_of_field(X, w)


def test_courant_at_point_round_trip():
    c = declare_chart([("a1", 1), ("a2", 1), ("a3", 1)])
    D = doubled(c)
    form = sum((D.gen(f"D[a{i}]") * D.gen(f"D[a{i}]") for i in (1, 2, 3)), D.zero()).scale(Fraction(1, 2))
    w = check_symplectic(form)
    S = c.gen("a1") * c.gen("a2") * c.gen("a3")
    X = hamiltonian_vector_field(S, w)
    assert hamiltonian_of_field(X, w) == S
    assert check_master_equation(S, w)


def test_matrix_round_trip():
    for make in CORPUS:
        _, w = make()
        assert two_form_from_matrix(w.ctx, two_form_matrix(w.form)) == w.form


def test_master_equation_degree_checked():
    c, w = darboux()
    with pytest.raises(DegreeMismatch):
        check_master_equation(c.gen("x"), w)


@pytest.mark.parametrize("make", CORPUS)
def test_euler_identity(make):
    _, w = make()
    alpha = liouville_potential(w)
    from gradedgeom.derivations import euler_field

    assert de_rham(contract(euler_field(w.base), w.form)) == w.form.scale(w.k)
    assert de_rham(alpha) == w.form


@pytest.mark.parametrize("make", CORPUS)
def test_hamiltonian_round_trip(make):
    _, w = make()
    rng = random.Random(5)
    done = 0
    for _ in range(200):
        f = random_homogeneous(rng, w)
        if f is None:
            continue
        X = hamiltonian_vector_field(f, w)
        if X.is_zero() or w.k + X.degree == 0:
            continue
        H = hamiltonian_of_field(X, w)
        assert contract(X, w.form) == de_rham(H)
        assert (H - f).is_constant()
        done += 1
    assert done >= 20


@given(seeds)
def test_bracket_degree_and_skew(seed):
    rng = random.Random(seed)
    _, w = rng.choice(CORPUS)()
    f, g = random_homogeneous(rng, w), random_homogeneous(rng, w)
    if f is None or g is None:
        return
    fg = poisson_bracket(f, g, w)
    gf = poisson_bracket(g, f, w)
    df, dg = degree_of(f), degree_of(g)
    sign = -1 if ((df - w.k) * (dg - w.k)) % 2 else 1
    assert fg == gf.scale(-sign)
    if fg:
        assert degree_of(fg) == df + dg - w.k


@given(seeds)
def test_hamiltonian_of_bracket_is_commutator(seed):
    rng = random.Random(seed)
    _, w = rng.choice(CORPUS)()
    f, g = random_homogeneous(rng, w), random_homogeneous(rng, w)
    if f is None or g is None:
        return
    fg = poisson_bracket(f, g, w)
    Xf, Xg = hamiltonian_vector_field(f, w), hamiltonian_vector_field(g, w)
    lhs = hamiltonian_vector_field(fg, w) if fg else None
    rhs = commutator(Xf, Xg)
    # global sign (-1)^(k+1) under the bracket convention {f,g} = (-1)^(|f|+1) X_f(g)
    sign = 1 if w.k % 2 else -1
    if lhs is None:
        assert rhs.is_zero()
    else:
        assert lhs == rhs.scale(sign)


@given(seeds)
def test_graded_jacobi_of_bracket(seed):
    rng = random.Random(seed)
    _, w = rng.choice(CORPUS)()
    f, g, h = (random_homogeneous(rng, w, 0, 3) for _ in range(3))
    if None in (f, g, h):
        return
    k = w.k

    def br(a, b):
        return poisson_bracket(a, b, w) if a and b else w.base.zero()

    def sd(a):
        return degree_of(a) - k

    lhs = br(f, br(g, h))
    rhs = br(br(f, g), h)
    extra = br(g, br(f, h))
    sign = -1 if (sd(f) * sd(g)) % 2 else 1
    assert lhs == rhs + extra.scale(sign)

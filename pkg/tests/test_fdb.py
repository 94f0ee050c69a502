import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from factories import R, laurent_diffeo, random_diffeo
from qshrenorm.errors import InadmissibleDecompositionError, ModelHypothesisError, RingMismatchError
from qshrenorm.fdb import (
    FDB,
    Diffeo,
    admissible_decompositions,
    compositions,
    diffeo_birkhoff,
    diffeo_compose,
    diffeo_inverse,
    diffeo_inverse_by_substitution,
    dynamics_coefficient,
    dynamics_diffeo,
    fdb_character,
    fdb_coproduct,
    fdb_iota,
    fdb_reduced_coproduct,
    inverse_coefficients,
    lambda_coeff,
    monomial,
    partitions,
    render_monomial,
    weak_compositions,
)
from qshrenorm.hopfmaps import birkhoff_recursive, convolve, iota_general
from qshrenorm.rings import MS, LaurentRing, LaurentSeries, PolynomialRing

# combinatorics -------------------------------------------------------------------


def test_enumerations():
    for n in range(1, 8):
        assert len(list(compositions(n))) == 2 ** (n - 1)
        assert all(sum(c) == n for c in compositions(n))
    assert len(list(weak_compositions(4, 3))) == math.comb(6, 2)
    assert [len(list(partitions(n))) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]


def test_monomials():
    assert monomial(3, 0, 1, 1) == (1, 1, 3)
    assert render_monomial((1, 1, 3)) == "a1^2*a3"
    assert render_monomial(()) == "1"
    with pytest.raises(ValueError):
        monomial(-1)


# coproduct -------------------------------------------------------------------------


def test_small_coproducts():
    assert fdb_coproduct(1).terms() == {((1,), ()): 1, ((), (1,)): 1}
    assert fdb_coproduct(2).terms() == {((2,), ()): 1, ((1,), (1,)): 2, ((), (2,)): 1}
    assert fdb_reduced_coproduct(3).terms() == {((1,), (2,)): 2, ((1,), (1, 1)): 1, ((2,), (1,)): 3}


@pytest.mark.parametrize("n", range(1, 8))
def test_reduced_coproduct_closed_form(n):
    assert fdb_reduced_coproduct(n).terms() == FDB.reduced_coproduct((n,))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.lists(st.fractions(-3, 3, max_denominator=3), min_size=5, max_size=5), min_size=2, max_size=2))
def test_characters_turn_composition_into_convolution(coeff_pair):
    f, g = (Diffeo.of(c) for c in coeff_pair)
    pf, pg, pfg = fdb_character(f), fdb_character(g), fdb_character(diffeo_compose(f, g))
    for m in FDB.basis_upto(5)[1:]:
        assert convolve(pf, pg, m) == pfg(m)


# iota and the lambda coefficients --------------------------------------------------------


def test_lambda_coefficients():
    assert lambda_coeff([[1]]) == 1
    assert lambda_coeff([[1], [1]]) == 2
    assert lambda_coeff([[2], [1, 1], [1]]) == math.comb(3, 2) * math.comb(5, 1)
    with pytest.raises(InadmissibleDecompositionError):
        lambda_coeff([[1, 1]])
    with pytest.raises(InadmissibleDecompositionError):
        lambda_coeff([[1], []])


def test_admissible_decompositions_count():
    for s in range(2, 6):
        parts = tuple(range(1, s + 1))
        decs = list(admissible_decompositions(parts))
        assert len(decs) == 2 ** (s - 2)
        assert all(len(d[0]) == 1 for d in decs)


@pytest.mark.parametrize("n", range(1, 7))
def test_iota_against_iterated_reduced_coproducts(n):
    assert fdb_iota(n) == iota_general((n,), FDB)


def test_inverse_coefficients():
    assert inverse_coefficients(1) == {(1,): -1}
    assert inverse_coefficients(2) == {(2,): -1, (1, 1): 2}
    assert inverse_coefficients(3) == {(3,): -1, (1, 2): 5, (1, 1, 1): -5}


# diffeomorphisms ------------------------------------------------------------------------


def test_signed_catalan_inverse():
    g = diffeo_inverse(Diffeo.of([1, 0, 0, 0, 0, 0]))
    assert list(g.coeffs) == [Fraction((-1) ** n * math.comb(2 * n, n), n + 1) for n in range(1, 7)]
    assert str(Diffeo.of(g.coeffs[:4])) == "x - x^2 + 2*x^3 - 5*x^4 + 14*x^5"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 8))
def test_inverse_agrees_with_substitution(seed, order):
    f = random_diffeo(random.Random(seed), order)
    g = diffeo_inverse(f)
    assert g == diffeo_inverse_by_substitution(f)
    assert diffeo_compose(g, f).is_identity()
    assert diffeo_compose(f, g).is_identity()


def test_composition_is_associative():
    rng = random.Random(1)
    f, g, h = (random_diffeo(rng, 6) for _ in range(3))
    assert diffeo_compose(diffeo_compose(f, g), h) == diffeo_compose(f, diffeo_compose(g, h))
    assert diffeo_compose(f, Diffeo.identity(6)) == f


def test_composition_checks_operands():
    with pytest.raises(ValueError):
        diffeo_compose(Diffeo.of([1]), Diffeo.of([1, 2]))
    with pytest.raises(RingMismatchError):
        diffeo_compose(Diffeo.of([1]), Diffeo.of([R.one]))


def test_rendering_and_construction():
    assert str(Diffeo.of([Fraction(1, 2), 0, -2])) == "x + (1/2)*x^2 - 2*x^4"
    assert Diffeo.of([R.eps(-1)]).ring == R
    assert Diffeo.of([1, 2])[0] == 1 and Diffeo.of([1, 2])[2] == 2
    assert Diffeo.of([1, 2]).series() == [0, 1, 1, 2]


# Birkhoff factorization of diffeomorphisms --------------------------------------------------


@pytest.mark.parametrize("seed", range(5))
def test_diffeo_birkhoff(seed):
    f = laurent_diffeo(random.Random(seed), 5)
    f_minus, f_plus = diffeo_birkhoff(f)
    assert all(MS.in_minus(c) for c in f_minus.coeffs)
    assert all(MS.in_plus(c) for c in f_plus.coeffs)
    assert diffeo_compose(f_minus, f) == f_plus
    minus, plus = birkhoff_recursive(fdb_character(f))
    for n in range(1, 6):
        assert minus((n,)) == f_minus[n]
        assert plus((n,)) == f_plus[n]


def test_diffeo_birkhoff_needs_commutative_coefficients():
    class Opaque:
        commutative = False
        zero, one = 0, 1

    with pytest.raises(ModelHypothesisError):
        diffeo_birkhoff(Diffeo((1, 2), Opaque()))


# the resonant vector field --------------------------------------------------------------------


def test_dynamics_coefficient():
    a = dynamics_coefficient([0, 1], x_degree=3, eps_high=4)
    x = PolynomialRing(["x"], 3).gen("x")
    assert a == LaurentSeries({k: x * (-((-2) ** k)) for k in range(5)}, 4, a.ring)
    pole = dynamics_coefficient([2], x_degree=3, eps_high=4)
    assert pole.is_exact and pole.coeff(-1) == -2


@pytest.mark.parametrize("b", [[1, 1], [0, 1, -1], [2, 0, 1]])
def test_dynamics_factors_match_the_mobius_form(b):
    a, f = dynamics_diffeo(b, x_degree=3, z_order=4, eps_high=4)
    f_minus, f_plus = diffeo_birkhoff(f)
    for n in range(1, 5):
        assert f_plus[n].agrees(MS.plus(a) ** n)
        assert f_minus[n].agrees((-MS.minus(a)) ** n)


def test_dynamics_ring():
    a, f = dynamics_diffeo([1, 1], x_degree=2, z_order=3, eps_high=3)
    assert a.ring == LaurentRing(PolynomialRing(["x"], 2), 3)
    assert f.order == 3 and f[2] == a * a

"""
Analytic Boundary Testing Suite
-------------------------------

This module tests root finding, measure recovery, Hankel factorizations,
binary-form Waring identities and generating functions.

The test suite verifies:
1. Aberth-Ehrlich roots against numpy, and exact roots from factorisation over Q(i)
2. The forward moment oracle and AtomicMeasure validation
3. Measure recovery in both index conventions, and its failure modes
4. Vandermonde (V^T D V) and Gramian (V^T V) factorizations of Hankel windows
5. Waring decompositions of the binary forms built from a sequence
6. Rational generating functions, their displays, poles and series

These are the places where exact and numeric computation meet, so each test
checks that the exact path stays exact and the numeric path stays within tolerance.
"""

import random
from fractions import Fraction

import numpy as np
import pytest

from analytic import (
    AtomicMeasure,
    Convention,
    NotGramian,
    characteristic_roots,
    exact_roots,
    find_roots,
    genfun,
    gramian_factor,
    moments,
    numeric_moments,
    recover_measure,
    vandermonde_factor,
    waring_build,
    waring_decompose,
    waring_verify,
)
from exact_linalg import ExactMatrix, PrefixTooShort, SequenceWindow, ShapeError
from exactnum import DegenerateInput, ExactPoly, GaussianRational
from ranks import ErrorNotSimple
from recurrence import IndexConventionError

G = GaussianRational.parse


def window(values, start_index=0):
    return SequenceWindow.from_values(values, start_index)


@pytest.fixture(scope="module")
def geometric():
    return window([6, 18, 54, 162])


@pytest.fixture(scope="module")
def fib():
    return window([1, 1, 2, 3, 5, 8, 13, 21, 34, 55])


@pytest.fixture(scope="module")
def n2n():
    return window([0, 2, 8, 24, 64, 160])


def test_find_roots_matches_numpy():
    """
    Test 1: Aberth roots agree with numpy.roots and are ordered by magnitude then phase

    Rationale:
      - x^2 - 2 has roots sqrt 2 (phase 0) and -sqrt 2 (phase pi)
      - x^3 - 1 has the three cube roots of unity in increasing phase
      - A degree-5 polynomial with mixed magnitudes checks the ordering
    """
    roots = find_roots(ExactPoly((-2, 0, 1)))
    assert np.allclose(roots, [2**0.5, -(2**0.5)], atol=1e-12)
    cube = find_roots(ExactPoly((-1, 0, 0, 1)))
    expected = [np.exp(2j * np.pi * k / 3) for k in range(3)]
    assert np.allclose(cube, expected, atol=1e-12)
    p = ExactPoly((3, -1, 4, 1, -5, 9))
    ours = np.array(find_roots(p))
    theirs = np.roots(p.to_numpy()[::-1])
    assert len(ours) == 5
    assert all(np.min(np.abs(ours - z)) < 1e-9 for z in theirs)
    with pytest.raises(DegenerateInput):
        find_roots(ExactPoly.constant(4))


def test_exact_roots_from_factorisation():
    """
    Test 2: Rational and Gaussian-rational roots are recovered exactly, irrational ones are not

    Rationale:
      - Roots come from the linear factors over Q(i), so no denominator is too large
      - A real quadratic such as x^2 + 1 still splits over Q(i)
      - An irreducible quadratic factor sends only that factor to Aberth iteration;
        the rational root beside it keeps its exact value up to float rounding
      - characteristic_roots reports which path it took
      - A measure with an atom of denominator 1234567 is recovered exactly from 8 moments
    """
    p = ExactPoly.from_roots([Fraction(1, 3), -2, G("i")])
    assert exact_roots(p) == [G("1/3"), G("i"), G("-2")]
    tiny = Fraction(1, 1234567)
    assert exact_roots(ExactPoly.from_roots([tiny, 2])) == [GaussianRational(tiny), G("2")]
    assert exact_roots(ExactPoly.from_roots([G("1/999983+2/7i"), G("-5/3")])) == [G("1/999983+2/7i"), G("-5/3")]
    real_with_gaussian = ExactPoly.from_roots([Fraction(5, 7)]) * ExactPoly((1, 0, 1))
    assert exact_roots(real_with_gaussian) == [G("5/7"), G("i"), G("-i")]
    assert exact_roots(ExactPoly((-2, 0, 1))) is None
    assert exact_roots(ExactPoly.from_roots([3, 3, 1])) == [G("1"), G("3"), G("3")]
    roots, exact = characteristic_roots(ExactPoly((-1, -1, 1)))
    assert not exact and len(roots) == 2
    mixed, exact = characteristic_roots(ExactPoly.from_roots([tiny]) * ExactPoly((-2, 0, 1)))
    assert not exact
    assert np.allclose(mixed, [1 / 1234567, 2**0.5, -(2**0.5)], atol=1e-12)
    roots, exact = characteristic_roots(ExactPoly((-6, 1)))
    assert exact and roots == [G("6")]
    measure = AtomicMeasure((GaussianRational(tiny), G("2")), (G("1"), G("1")))
    recovered = recover_measure(moments(measure, 8))
    assert recovered.is_exact
    assert dict(zip(recovered.support, recovered.masses)) == {GaussianRational(tiny): G("1"), G("2"): G("1")}


def test_forward_moments():
    """
    Test 3: The forward oracle in both conventions

    Rationale:
      - 2 delta(3): moment convention gives 6, 18, 54, 162
      - delta(2) + delta(3): unitary convention gives 5, 13, 35, 97 starting at index 1
      - numeric_moments must agree with the exact values
    """
    mu = AtomicMeasure((G("3"),), (G("2"),))
    assert moments(mu, 4) == window([6, 18, 54, 162])
    nu = AtomicMeasure((G("2"), G("3")), (G("1"), G("1")))
    unitary = moments(nu, 4, Convention.UNITARY_RANK)
    assert unitary == window([5, 13, 35, 97], start_index=1)
    assert np.allclose(numeric_moments(nu, 4, Convention.UNITARY_RANK), [5, 13, 35, 97])
    assert moments(AtomicMeasure((), ()), 3).is_zero
    with pytest.raises(TypeError):
        moments(AtomicMeasure((1.5 + 0j,), (1.0 + 0j,)), 3)


def test_atomic_measure_validation():
    """
    Test 4: Atoms must be distinct and nonzero, masses nonzero

    Rationale:
      - A measure violating these has a smaller rank than its support size suggests
    """
    with pytest.raises(DegenerateInput):
        AtomicMeasure((G("2"), G("2")), (G("1"), G("1")))
    with pytest.raises(DegenerateInput):
        AtomicMeasure((G("0"),), (G("1"),))
    with pytest.raises(DegenerateInput):
        AtomicMeasure((G("2"),), (G("0"),))
    with pytest.raises(ShapeError):
        AtomicMeasure((G("2"),), ())
    assert AtomicMeasure((G("2"),), (G("1"),)).to_dict()["atoms"][0]["exact"] == "2"


def test_recover_measure(geometric):
    """
    Test 5: Measure recovery in both conventions

    Rationale:
      - Geometric fixture: atom 3, mass 2; constant sequence: atom 1, mass 1
      - Power sums 5, 13, 35, 97 at index 1: atoms 2 and 3, masses 1 and 1
      - The zero sequence recovers the empty measure
    """
    mu = recover_measure(geometric)
    assert mu.support == (G("3"),) and mu.masses == (G("2"),)
    constant = recover_measure(window([1, 1, 1, 1, 1]))
    assert constant.support == (G("1"),) and constant.masses == (G("1"),)
    power = recover_measure(window([5, 13, 35, 97, 275], start_index=1))
    assert power.support == (G("2"), G("3")) and power.masses == (G("1"), G("1"))
    assert recover_measure(window([0, 0, 0, 0])).support == ()


def test_recover_measure_failures(n2n):
    """
    Test 6: Failed ranks propagate as RankFailure exceptions

    Rationale:
      - n*2^n has no atomic representation; the certificate travels with the exception
    """
    with pytest.raises(ErrorNotSimple) as info:
        recover_measure(n2n)
    assert info.value.certificate.char_poly == ExactPoly((4, -4, 1))


def test_oracle_closure():
    """
    Test 7: recover_measure and moments invert each other on random measures

    Rationale:
      - recover(moments(mu)) = mu exactly, and moments(recover(c)) reproduces c
    """
    rng = random.Random(11)
    for _ in range(25):
        r = rng.randint(1, 4)
        atoms = set()
        while len(atoms) < r:
            z = GaussianRational(Fraction(rng.randint(-12, 12), rng.randint(1, 6)), Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
            if z:
                atoms.add(z)
        masses = tuple(GaussianRational(Fraction(rng.choice([-5, -2, -1, 1, 3, 4]), rng.randint(1, 4))) for _ in atoms)
        mu = AtomicMeasure(tuple(atoms), masses)
        seq = moments(mu, 2 * r + 3)
        recovered = recover_measure(seq)
        assert dict(zip(recovered.support, recovered.masses)) == dict(zip(mu.support, mu.masses))
        assert moments(recovered, len(seq)) == seq


def test_vandermonde_factor(geometric, fib):
    """
    Test 8: Hankel windows factor as V^T D V

    Rationale:
      - Exact atoms give an exact factorization with zero residual
      - Fibonacci atoms are irrational; the numeric residual must stay below 1e-9
      - A window smaller than the rank cannot be factored non-degenerately
    """
    exact = vandermonde_factor(geometric, window=2)
    assert exact.exact and exact.residual == 0.0
    assert exact.V == ExactMatrix.from_rows([[1, 3]]) and exact.D == (G("6"),)
    numeric = vandermonde_factor(fib, window=3)
    assert not numeric.exact and numeric.residual < 1e-9
    with pytest.raises(ShapeError):
        vandermonde_factor(fib, window=1)


def test_gramian_factor_real_and_complex_atoms():
    """
    Test 9: Augmented power-sum windows are Gramians V^T V

    Rationale:
      - Real atoms {2, 3}: the window [[2, 5], [5, 13]] is PSD and factors exactly
      - Atoms {i, -i} give real power sums 0, -2, 0, 2, ... whose window [[2, 0], [0, -2]]
        still factors as V^T V but is not PSD
      - Complex sequences and index-0 windows are rejected
    """
    real = gramian_factor(window([5, 13, 35, 97, 275], start_index=1))
    assert real.psd and real.exact and real.residual == 0.0
    assert real.window_matrix == ExactMatrix.from_rows([[2, 5], [5, 13]])
    complex_pair = gramian_factor(window([0, -2, 0, 2, 0, -2], start_index=1))
    assert not complex_pair.psd and complex_pair.residual == 0.0
    with pytest.raises(NotGramian):
        gramian_factor(window([G("i"), 1, 1], start_index=1))
    with pytest.raises(IndexConventionError):
        gramian_factor(window([5, 13, 35]))


def test_waring_form_geometric():
    """
    Test 10: Waring identity for 2 delta(3)

    Rationale:
      - The form at t = 0 has coefficients (6, 2*18, 54) = (6, 36, 54) = 6 (x + 3y)^2
      - lambda = mass * atom = 6 at every shift t
      - A wrong atom cannot reproduce the form, and neither can the right atom with
        the wrong mass: 5 delta(3) would give 15 (x + 3y)^2
      - Power sums fix lambda = mass, so delta(2) + delta(3) verifies only under the
        unitary convention
    """
    geometric = window([6, 18, 54, 162, 486])
    mu = recover_measure(geometric)
    form = waring_build(geometric, 1, 0)
    assert form.coeff == (6, 36, 54)
    for t in (0, 1, 2):
        solved = waring_decompose(waring_build(geometric, 1, t), mu)
        assert solved.decomposition == ((G("6"), G("1"), G("3")),), f"t={t}"
        assert waring_verify(waring_build(geometric, 1, t), mu)
    assert not waring_verify(form, AtomicMeasure((G("2"),), (G("3"),)))
    assert not waring_verify(waring_build(window([6, 18, 54]), 1, 0), AtomicMeasure((G("3"),), (G("5"),)))
    assert not waring_verify(form, AtomicMeasure((G("3"),), (G("-2"),)))
    power_sums = window([5, 13, 35, 97, 275], start_index=1)
    unit_masses = AtomicMeasure((G("2"), G("3")), (G("1"), G("1")))
    assert waring_verify(waring_build(power_sums, 2, 1), unit_masses, Convention.UNITARY_RANK)
    for t in (1, 2, 3):
        assert waring_verify(waring_build(power_sums, 1, t), unit_masses, Convention.UNITARY_RANK), f"t={t}"
        assert not waring_verify(waring_build(power_sums, 1, t), unit_masses), f"t={t}"
    with pytest.raises(PrefixTooShort):
        waring_build(geometric, 1, 3)


def test_waring_numeric(fib):
    """
    Test 11: Waring identity on irrational atoms

    Rationale:
      - The numeric path must verify the Fibonacci forms within RESIDUAL_TOL
    """
    mu = recover_measure(fib)
    assert not mu.is_exact
    for t in (0, 1, 2):
        assert waring_verify(waring_build(fib, 2, t), mu)


@pytest.mark.parametrize(
    "values, display, simple",
    [
        ([1, 1, 2, 3, 5, 8], "1 / (1 - z - z^2)", True),
        ([6, 18, 54, 162], "6 / (1 - 3z)", True),
        ([0, 2, 8, 24, 64, 160], "2z / (1 - 2z)^2", False),
        ([1, 1, 1, 1, 1], "1 / (1 - z)", True),
        ([1, 3, 7, 15, 31, 63], "1 / (1 - 3z + 2z^2)", True),
    ],
)
def test_genfun_display(values, display, simple):
    """
    Test 12: Generating functions of the fixtures

    Rationale:
      - Fibonacci, geometric, n*2^n, constant and 2^(n+1) - 1 have well-known closed forms
      - Pole simplicity comes from the exact squarefree test
    """
    gf = genfun(window(values))
    assert gf.format() == display
    assert gf.simple is simple
    assert gf.denominator[0] == 1


def test_genfun_series_and_poles(n2n, geometric):
    """
    Test 13: Series re-expansion and pole lists

    Rationale:
      - numerator / denominator re-expanded as a power series reproduces the prefix exactly
      - n*2^n has the double pole 1/2; the geometric fixture has the simple pole 1/3
    """
    for seq in (n2n, geometric, window([1, 1, 2, 3, 5, 8, 13, 21])):
        gf = genfun(seq)
        assert gf.series_coefficients(len(seq)) == seq.terms
    assert genfun(n2n).poles == ((G("1/2"), 2),)
    assert genfun(geometric).poles == ((G("1/3"), 1),)
    zero = genfun(window([0, 0, 0]))
    assert zero.numerator.is_zero and zero.format() == "0"


def test_genfun_respects_index_origin():
    """
    Test 14: Power sums indexed from 1 have no constant term

    Rationale:
      - Phi(z) = sum over n >= 1 of (2^n + 3^n) z^n = (5z - 12z^2) / (1 - 5z + 6z^2)
      - The series re-expansion starts with a zero for c_0, then the window itself
      - Shifting the same values to index 0 drops the factor z
    """
    power_sums = window([5, 13, 35, 97, 275], start_index=1)
    gf = genfun(power_sums)
    assert gf.numerator == ExactPoly((0, 5, -12))
    assert gf.format() == "(5z - 12z^2) / (1 - 5z + 6z^2)"
    assert gf.series_coefficients(6) == (G("0"),) + power_sums.terms
    assert genfun(window([5, 13, 35, 97, 275])).numerator == ExactPoly((5, -12))


if __name__ == "__main__":
    pytest.main(["-v", __file__])

"""
Recurrence Testing Suite
------------------------

This module tests minimal recurrence detection, the recurrence ideal and the
Newton-identity conversion from power sums to elementary symmetric values.

The test suite verifies:
1. Minimal recurrences of classic sequences (Fibonacci, geometric, n*2^n)
2. The zero sequence, short prefixes and prefixes with no recurrence
3. Recovery of prod(x - beta_i) from moments of a known measure
4. Ideal generators and the radical (squarefree) test
5. Newton's identities and the tail check that certifies a unitary rank

A recurrence accepted here is the foundation of every rank certificate, so
these tests check both acceptance and rejection.
"""

import random
from fractions import Fraction

import pytest

from exact_linalg import PrefixTooShort, SequenceWindow
from exactnum import ExactPoly, GaussianRational
from recurrence import (
    IndexConventionError,
    NewtonPoly,
    NoGeneratorWithinPrefix,
    Recurrence,
    RecurrenceOutcome,
    ideal_generator,
    is_radical,
    minimal_recurrence,
    newton_tail_check,
    power_sums_to_newton,
    verify_recurrence,
)


def window(values, start_index=0):
    return SequenceWindow.from_values(values, start_index)


@pytest.mark.parametrize(
    "values, coeffs",
    [
        ([1, 1, 2, 3, 5, 8, 13, 21], (-1, -1, 1)),
        ([6, 18, 54, 162], (-3, 1)),
        ([1, 1, 1, 1, 1], (-1, 1)),
        ([0, 2, 8, 24, 64, 160], (4, -4, 1)),
        ([1, -1, 1, -1, 1], (1, 1)),
    ],
)
def test_minimal_recurrence_examples(values, coeffs):
    """
    Test 1: Minimal recurrences of worked examples

    Rationale:
      - Fibonacci: x^2 - x - 1; 2*3^(n+1): x - 3; constant: x - 1
      - n*2^n has the repeated characteristic root 2: x^2 - 4x + 4
      - The recurrence must hold on every shift of the prefix
    """
    seq = window(values)
    rec = minimal_recurrence(seq)
    assert isinstance(rec, Recurrence), f"no recurrence for {values}"
    assert rec.characteristic_poly() == ExactPoly(coeffs)
    assert verify_recurrence(seq, rec) == len(values) - rec.order


def test_zero_sequence_and_short_prefix():
    """
    Test 2: Zero sequence and prefixes shorter than three terms

    Rationale:
      - The zero sequence has rank 0: every polynomial annihilates it
      - Fewer than three terms cannot certify even a first-order recurrence
    """
    assert minimal_recurrence(window([0, 0, 0, 0])) is RecurrenceOutcome.ZERO_SEQUENCE
    with pytest.raises(PrefixTooShort) as info:
        minimal_recurrence(window([1, 2]))
    assert info.value.needed == 3


def test_no_recurrence_within_prefix():
    """
    Test 3: A prefix with no admissible recurrence

    Rationale:
      - 1, 2, 5 only allows order 1, and c_2 = 5 != 2 * 2 breaks it
      - Squares 0, 1, 4, 9, 16 need order 3 > floor(4/2): the prefix is too short to certify
    """
    assert minimal_recurrence(window([1, 2, 5])) is RecurrenceOutcome.NONE_FOUND
    assert minimal_recurrence(window([0, 1, 4, 9, 16])) is RecurrenceOutcome.NONE_FOUND
    with pytest.raises(NoGeneratorWithinPrefix):
        ideal_generator(window([1, 2, 5]))


def test_singular_leading_window_is_skipped():
    """
    Test 4: Orders whose leading Hankel window is singular are skipped

    Rationale:
      - 0, 1, 0, 1, 0, 1 has c_0 = 0, so order 1 cannot be solved; order 2 gives x^2 - 1
    """
    rec = minimal_recurrence(window([0, 1, 0, 1, 0, 1]))
    assert rec.characteristic_poly() == ExactPoly((-1, 0, 1))


def test_recurrence_from_known_measure():
    """
    Test 5: Moments of a known measure give prod(x - beta_i)

    Rationale:
      - c_n = sum(alpha_i beta_i^(n+1)) with distinct nonzero atoms satisfies exactly
        the recurrence whose characteristic roots are the atoms
      - Checked on random Gaussian-rational measures against the forward oracle
    """
    rng = random.Random(7)
    for _ in range(30):
        r = rng.randint(1, 4)
        atoms = set()
        while len(atoms) < r:
            z = GaussianRational(Fraction(rng.randint(-9, 9), rng.randint(1, 5)), rng.randint(-3, 3))
            if z:
                atoms.add(z)
        atoms = list(atoms)
        masses = [GaussianRational(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(-2, 2)) for _ in atoms]
        terms = [sum((m * b ** (n + 1) for m, b in zip(masses, atoms)), GaussianRational(0)) for n in range(2 * r + 2)]
        rec = minimal_recurrence(window(terms))
        assert isinstance(rec, Recurrence)
        assert rec.characteristic_poly() == ExactPoly.from_roots(atoms), f"atoms {atoms}"


def test_ideal_generator_and_radical():
    """
    Test 6: Ideal generator and radical test

    Rationale:
      - The zero sequence generates the unit ideal: generator 1, radical
      - Fibonacci has a squarefree generator; n*2^n does not
    """
    assert ideal_generator(window([0, 0, 0])) == ExactPoly.constant(1)
    assert is_radical(window([0, 0, 0]))
    assert is_radical(window([1, 1, 2, 3, 5, 8]))
    assert not is_radical(window([0, 2, 8, 24, 64, 160]))


def test_recurrence_validation():
    """
    Test 7: Recurrence objects must be monic with order >= 1

    Rationale:
      - Monic coefficient vectors are the canonical form compared across paths
    """
    with pytest.raises(ValueError):
        Recurrence((1,))
    with pytest.raises(ValueError):
        Recurrence((1, 2))
    assert Recurrence.from_poly(ExactPoly((6, -5, 1)).scale(3)).coeffs == ExactPoly((6, -5, 1)).coeffs


def test_newton_identities_on_power_sums():
    """
    Test 8: Power sums of {2, 3} give e_1 = 5, e_2 = 6 and nothing beyond

    Rationale:
      - sum((-1)^k e_k x^k) = (1 - 2x)(1 - 3x) and the characteristic polynomial is (x-2)(x-3)
      - The candidate rank is the index of the last nonzero e_k
    """
    seq = window([5, 13, 35, 97, 275], start_index=1)
    newton = power_sums_to_newton(seq)
    assert newton.elementary == tuple(GaussianRational(v) for v in (1, 5, 6, 0, 0, 0))
    assert newton.candidate_rank() == 2
    assert newton.reciprocal_poly() == ExactPoly((1, -5, 6))
    assert newton.characteristic_poly() == ExactPoly.from_roots([2, 3])
    assert newton_tail_check(newton, seq, 2)


def test_newton_with_multiplicity():
    """
    Test 9: Repeated atoms are counted with multiplicity

    Rationale:
      - The multiset {1, 1, -2} has power sums 0, 6, -6, 18 and polynomial (x-1)^2 (x+2)
    """
    atoms = [1, 1, -2]
    seq = window([sum(b ** n for b in atoms) for n in range(1, 8)], start_index=1)
    newton = power_sums_to_newton(seq)
    r = newton.candidate_rank()
    assert r == 3
    assert newton.characteristic_poly(r) == ExactPoly.from_roots(atoms)
    assert newton_tail_check(newton, seq, r)


def test_newton_tail_rejects_perturbation():
    """
    Test 10: Perturbing the last power sum breaks the certificate

    Rationale:
      - A single changed term must either raise the candidate rank to the prefix length
        or fail the tail check; it can never certify the original rank
    """
    clean = [5, 13, 35, 97, 275]
    perturbed = window(clean[:-1] + [276], start_index=1)
    newton = power_sums_to_newton(perturbed)
    r = newton.candidate_rank()
    assert r == len(clean) or not newton_tail_check(newton, perturbed, r)
    assert not newton_tail_check(newton, perturbed, 2)


def test_newton_requires_index_one():
    """
    Test 11: Newton's identities refuse index-0 windows

    Rationale:
      - Power sums p_k start at k = 1; an index-0 window would misalign every identity
    """
    with pytest.raises(IndexConventionError):
        power_sums_to_newton(window([5, 13, 35]))
    with pytest.raises(ValueError):
        NewtonPoly((2, 1), 1)


if __name__ == "__main__":
    pytest.main(["-v", __file__])

"""
Exact Linear Algebra Testing Suite
----------------------------------

This module tests sequence windows, Hankel windows and the fraction-free
linear algebra used to find recurrences and certify ranks.

The test suite verifies:
1. SequenceWindow indexing, the shift T[C] and augmentation
2. Hankel window construction, including the absolute shift t and short prefixes
3. Bareiss determinants, exact solves, kernels and column rank
4. The exact positive semi-definiteness test
5. Matrix powers and traces used by the walk-count application
6. Seeded checks: Bareiss against cofactor expansion, Hankel anti-diagonals, rank-nullity

Each test states why the property matters for the rank computations.
"""

import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import hankel

from exact_linalg import (
    ExactMatrix,
    PrefixTooShort,
    SequenceWindow,
    ShapeError,
    SingularMatrix,
    column_rank,
    exact_det,
    hankel_window,
    kernel_basis,
    matrix_power,
    psd_window_check,
    solve,
    trace,
)
from exactnum import DegenerateInput, GaussianRational

G = GaussianRational.parse


@pytest.fixture(scope="module")
def fib():
    """First ten Fibonacci numbers as an index-0 window."""
    return SequenceWindow.from_values([1, 1, 2, 3, 5, 8, 13, 21, 34, 55])


def test_window_indexing_and_shift():
    """
    Test 1: Absolute indexing and the shift operator

    Rationale:
      - Power sums start at c_1 and moments at c_0; T[C]_n = c_{n+1} must respect both
      - Shifting an index-1 window only relabels it; shifting an index-0 window drops c_0
    """
    power_sums = SequenceWindow.from_values([5, 13, 35], start_index=1)
    assert power_sums.term(1) == 5 and power_sums.end_index == 3
    shifted = power_sums.shift()
    assert shifted.start_index == 0 and shifted.terms == power_sums.terms
    moments = SequenceWindow.from_values([6, 18, 54])
    assert moments.shift() == SequenceWindow(0, (18, 54))
    with pytest.raises(PrefixTooShort):
        moments.term(3)
    with pytest.raises(DegenerateInput):
        SequenceWindow(0, ())


def test_augmented_window():
    """
    Test 2: Prepending c'_0 for the Gramian window

    Rationale:
      - The augmented sequence moves the origin down by one and keeps the old terms
    """
    window = SequenceWindow.from_values([0, 2, 0], start_index=1).augmented(2)
    assert window.start_index == 0 and window.terms == tuple(GaussianRational(v) for v in (2, 0, 2, 0))
    with pytest.raises(DegenerateInput):
        window.augmented(1)


def test_hankel_window_matches_scipy(fib):
    """
    Test 3: Hankel windows agree with scipy.linalg.hankel

    Rationale:
      - H_{m,t} has entry c_{t+i+j}; scipy builds the same matrix from first column and last row
      - The absolute shift t must offset into the window
    """
    c = fib.to_numpy()
    for m, t in [(0, 0), (2, 0), (3, 2), (4, 1)]:
        H = hankel_window(fib, m, t)
        expected = hankel(c[t : t + m + 1], c[t + m : t + 2 * m + 1])
        assert np.array_equal(H.to_numpy(), expected), f"H_({m},{t}) differs"


def test_hankel_window_errors(fib):
    """
    Test 4: Windows beyond the prefix or before the origin are rejected

    Rationale:
      - PrefixTooShort carries how many terms were needed so the caller can report it
    """
    with pytest.raises(PrefixTooShort) as info:
        hankel_window(fib, 5)
    assert (info.value.needed, info.value.have) == (11, 10)
    shifted = SequenceWindow.from_values([1, 2, 3, 4, 5], start_index=1)
    with pytest.raises(ShapeError):
        hankel_window(shifted, 1, t=0)


def test_bareiss_determinant():
    """
    Test 5: Determinants by fraction-free elimination

    Rationale:
      - The 2x2 Fibonacci Hankel window has determinant 1 and the 3x3 window is singular
      - A zero leading entry forces a row swap and a sign flip
      - Gaussian-rational entries must work: det [[1, i], [i, 1]] = 2
    """
    fib = SequenceWindow.from_values([1, 1, 2, 3, 5, 8, 13])
    assert exact_det(hankel_window(fib, 1)) == 1
    assert exact_det(hankel_window(fib, 2)) == 0
    assert exact_det(ExactMatrix.from_rows([[0, 1], [1, 0]])) == -1
    assert exact_det(ExactMatrix.from_rows([[1, G("i")], [G("i"), 1]])) == 2
    assert exact_det(ExactMatrix.from_rows([[Fraction(1, 2), 3], [1, 4]])) == -1
    with pytest.raises(ShapeError):
        exact_det(ExactMatrix.from_rows([[1, 2, 3]]))


def test_solve_and_singular_systems():
    """
    Test 6: Exact solves and singular-system detection

    Rationale:
      - Recurrence coefficients and masses are found by exact solves
      - A singular system must raise rather than return a spurious solution
    """
    M = ExactMatrix.from_rows([[2, 1], [1, 3]])
    x = solve(M, [3, 5])
    assert M @ x == (3, 5)
    assert x == (Fraction(4, 5), Fraction(7, 5))
    with pytest.raises(SingularMatrix):
        solve(ExactMatrix.from_rows([[1, 2], [2, 4]]), [1, 2])
    with pytest.raises(ShapeError):
        solve(M, [1])


def test_kernel_and_column_rank(fib):
    """
    Test 7: Kernel basis and rank-nullity on a Fibonacci Hankel window

    Rationale:
      - H_{2,0} has rank 2 and its kernel is the recurrence (-1, -1, 1), monic in the last entry
      - rank + nullity = number of columns
    """
    H = hankel_window(fib, 2)
    basis = kernel_basis(H)
    assert basis == [tuple(GaussianRational(v) for v in (-1, -1, 1))]
    assert column_rank(H) + len(basis) == H.cols
    assert kernel_basis(ExactMatrix.identity(3)) == []
    assert column_rank(ExactMatrix.zeros(2, 3)) == 0


def test_psd_window_check():
    """
    Test 8: Exact positive semi-definiteness

    Rationale:
      - The augmented power-sum window of real atoms is a Gramian and must pass
      - [[2, 0], [0, 2]] passes, [[0, 1], [1, 0]] fails, a PSD singular matrix passes
      - Non-symmetric or complex input is a shape error, not a verdict
    """
    assert psd_window_check(ExactMatrix.from_rows([[2, 0], [0, 2]]))
    assert psd_window_check(ExactMatrix.from_rows([[1, 1], [1, 1]]))
    assert psd_window_check(ExactMatrix.zeros(2, 2))
    assert not psd_window_check(ExactMatrix.from_rows([[0, 1], [1, 0]]))
    assert not psd_window_check(ExactMatrix.from_rows([[1, 2], [2, 1]]))
    with pytest.raises(ShapeError):
        psd_window_check(ExactMatrix.from_rows([[1, 2], [0, 1]]))
    with pytest.raises(ShapeError):
        psd_window_check(ExactMatrix.from_rows([[1, G("i")], [G("i"), 1]]))


def test_matrix_power_and_trace():
    """
    Test 9: Powers and traces of an adjacency matrix

    Rationale:
      - tr(A^n) of the path graph P3 is 0, 4, 0, 8 for n = 1..4 (eigenvalues sqrt 2, 0, -sqrt 2)
      - A^0 is the identity
    """
    A = ExactMatrix.from_rows([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    assert [trace(matrix_power(A, n)) for n in range(1, 5)] == [0, 4, 0, 8]
    assert matrix_power(A, 0) == ExactMatrix.identity(3)
    assert np.array_equal(matrix_power(A, 3).to_numpy(), np.linalg.matrix_power(A.to_numpy(), 3))
    with pytest.raises(ShapeError):
        trace(ExactMatrix.from_rows([[1, 2]]))


def random_gaussian(rng: random.Random, bound: int = 6) -> GaussianRational:
    if rng.random() < 0.3:
        return GaussianRational(0)
    return GaussianRational(
        Fraction(rng.randint(-bound, bound), rng.randint(1, bound)),
        Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) if rng.random() < 0.5 else 0,
    )


def random_matrix(rng: random.Random, rows: int, cols: int) -> ExactMatrix:
    return ExactMatrix.from_rows([[random_gaussian(rng) for _ in range(cols)] for _ in range(rows)])


def cofactor_det(rows: list) -> GaussianRational:
    if len(rows) == 1:
        return rows[0][0]
    total = GaussianRational(0)
    for j, entry in enumerate(rows[0]):
        minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
        term = entry * cofactor_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def test_bareiss_matches_cofactor_expansion():
    """
    Test 10: Bareiss determinants equal Laplace expansion for sizes 1 to 4

    Rationale:
      - Entries are zero 30% of the time so pivots are often missing and rows must swap
      - Cofactor expansion uses no division at all, an independent exact oracle
    """
    rng = random.Random(21)
    for _ in range(120):
        m = rng.randint(1, 4)
        M = random_matrix(rng, m, m)
        rows = [[M[i, j] for j in range(m)] for i in range(m)]
        assert exact_det(M) == cofactor_det(rows), f"{rows}"


def test_hankel_windows_have_constant_anti_diagonals():
    """
    Test 11: Every Hankel window entry (i, j) is c_{t+i+j}

    Rationale:
      - Entries on one anti-diagonal are equal, for every admissible size and shift
      - The absolute shift t is measured from index 0 even when the window starts later
    """
    rng = random.Random(22)
    for _ in range(30):
        start = rng.randint(0, 2)
        seq = SequenceWindow.from_values([random_gaussian(rng) for _ in range(rng.randint(3, 11))], start)
        last = seq.start_index + len(seq) - 1
        for m in range(len(seq) // 2):
            for t in range(seq.start_index, last - 2 * m + 1):
                H = hankel_window(seq, m, t)
                for i in range(m + 1):
                    for j in range(m + 1):
                        assert H[i, j] == seq.terms[t - seq.start_index + i + j]
                        if i < m and j > 0:
                            assert H[i, j] == H[i + 1, j - 1]


def test_rank_nullity_on_random_matrices():
    """
    Test 12: column_rank + len(kernel_basis) = cols, and the basis lies in the kernel

    Rationale:
      - Products of a rows x k and a k x cols matrix have rank at most k, so kernels are non-trivial
      - Every basis vector is monic in its last nonzero entry
    """
    rng = random.Random(23)
    for _ in range(60):
        rows, cols, k = rng.randint(1, 5), rng.randint(1, 5), rng.randint(1, 4)
        M = random_matrix(rng, rows, k) @ random_matrix(rng, k, cols)
        basis = kernel_basis(M)
        assert column_rank(M) + len(basis) == cols
        assert column_rank(M) <= min(rows, cols, k)
        for v in basis:
            assert not any(M @ v)
            assert next(e for e in reversed(v) if e) == 1


if __name__ == "__main__":
    pytest.main(["-v", __file__])

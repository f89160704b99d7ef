"""
exact_linalg.py
---------------
Exact dense linear algebra over GaussianRational.

This module provides:
1. SequenceWindow: a finite prefix (c_t, ..., c_{t+N-1}) with its index origin,
   the universal input of the rank algorithms.
2. ExactMatrix: small dense row-major matrices with exact entries.
3. Hankel window construction H_{m,t}[i][j] = c_{t+i+j}.
4. Fraction-free (Bareiss) determinants, reduced row echelon kernels and ranks
   and exact linear solves, computed on sympy DomainMatrix objects over QQ_I,
   and a PSD test by pivoted LDL^T.

Nothing here touches floating point except the explicit `to_numpy` exports.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from sympy import QQ_I
from sympy.polys.matrices import DomainMatrix

from exactnum import ONE, ZERO, DegenerateInput, GaussianRational, SeqRankError

logger = logging.getLogger(__name__)


class PrefixTooShort(SeqRankError):
    """Raised when a window or check needs more terms than the prefix holds."""

    def __init__(self, needed: int, have: int):
        self.needed = needed
        self.have = have
        super().__init__(f"Need {needed} terms, prefix has {have}")

    def __reduce__(self):
        return (type(self), (self.needed, self.have))


class ShapeError(SeqRankError):
    """Raised for non-square, non-symmetric or mis-sized operands."""


class SingularMatrix(SeqRankError):
    """Raised when a linear solve meets a singular matrix."""


@dataclass(frozen=True)
class SequenceWindow:
    """
    A finite prefix of a sequence.

    Attributes:
        start_index: Absolute index of terms[0]; 0 for the moment-rank convention,
            1 for power sums (unitary rank).
        terms: The exact values c_start, c_start+1, ...
    """

    start_index: int
    terms: tuple

    def __post_init__(self):
        if self.start_index < 0:
            raise DegenerateInput(f"start_index must be >= 0, got {self.start_index}")
        terms = tuple(GaussianRational.coerce(c) for c in self.terms)
        if not terms:
            raise DegenerateInput("A sequence window needs at least one term")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_values(cls, values: Iterable, start_index: int = 0) -> "SequenceWindow":
        return cls(start_index, tuple(values))

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def end_index(self) -> int:
        """Absolute index of the last available term."""
        return self.start_index + len(self.terms) - 1

    def term(self, n: int) -> GaussianRational:
        """c_n by absolute index."""
        if not self.start_index <= n <= self.end_index:
            raise PrefixTooShort(n - self.start_index + 1, len(self.terms))
        return self.terms[n - self.start_index]

    @property
    def is_zero(self) -> bool:
        return not any(self.terms)

    @property
    def is_real(self) -> bool:
        return all(c.is_real for c in self.terms)

    def shift(self) -> "SequenceWindow":
        """The shifted sequence T[C] with T[C]_n = c_{n+1}."""
        if self.start_index >= 1:
            return SequenceWindow(self.start_index - 1, self.terms)
        if len(self.terms) == 1:
            raise PrefixTooShort(2, 1)
        return SequenceWindow(0, self.terms[1:])

    def augmented(self, first) -> "SequenceWindow":
        """Prepend a term one index before the current origin."""
        if self.start_index == 0:
            raise DegenerateInput("Cannot prepend before index 0")
        return SequenceWindow(self.start_index - 1, (GaussianRational.coerce(first),) + self.terms)

    def to_numpy(self) -> np.ndarray:
        return np.array([c.to_complex() for c in self.terms], dtype=complex)


@dataclass(frozen=True, repr=False)
class ExactMatrix:
    """Dense rows x cols matrix with row-major GaussianRational entries."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        entries = tuple(GaussianRational.coerce(e) for e in self.entries)
        if len(entries) != self.rows * self.cols:
            raise ShapeError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(entries)}"
            )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        width = len(rows[0]) if rows else 0
        if any(len(r) != width for r in rows):
            raise ShapeError("Ragged rows")
        return cls(len(rows), width, tuple(e for r in rows for e in r))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diagonal(cls, values: Sequence) -> "ExactMatrix":
        n = len(values)
        return cls(n, n, tuple(values[i] if i == j else 0 for i in range(n) for j in range(n)))

    def __getitem__(self, index) -> GaussianRational:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple:
        return self.entries[j :: self.cols]

    def to_rows(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows, tuple(e for j in range(self.cols) for e in self.column(j)))

    def to_domain_matrix(self) -> DomainMatrix:
        """The same matrix as a sympy DomainMatrix over QQ_I."""
        return DomainMatrix(
            [[e.value for e in self.row(i)] for i in range(self.rows)], (self.rows, self.cols), QQ_I
        )

    @classmethod
    def from_domain_matrix(cls, dm: DomainMatrix) -> "ExactMatrix":
        rows, cols = dm.shape
        dm = dm.convert_to(QQ_I)
        return cls(rows, cols, tuple(GaussianRational.from_domain(e) for row in dm.to_list() for e in row))

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.cols != other.rows:
                raise ShapeError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
            if 0 in (self.rows, self.cols, other.cols):
                return ExactMatrix.zeros(self.rows, other.cols)
            return ExactMatrix.from_domain_matrix(self.to_domain_matrix().matmul(other.to_domain_matrix()))
        vector = tuple(GaussianRational.coerce(x) for x in other)
        if len(vector) != self.cols:
            raise ShapeError(f"Vector of length {len(vector)} does not match {self.cols} columns")
        return tuple(_dot(self.row(i), vector) for i in range(self.rows))

    def to_numpy(self) -> np.ndarray:
        return np.array([e.to_complex() for e in self.entries], dtype=complex).reshape(self.rows, self.cols)

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(e) for e in self.row(i)) + "]" for i in range(self.rows)) + "]"

    def __repr__(self) -> str:
        return f"ExactMatrix({self})"


def _dot(u, v) -> GaussianRational:
    acc = ZERO
    for a, b in zip(u, v):
        if a and b:
            acc = acc + a * b
    return acc


def hankel_window(seq: SequenceWindow, m: int, t: int | None = None) -> ExactMatrix:
    """
    The (m+1)x(m+1) Hankel matrix with (i, j) entry c_{t+i+j}.

    Args:
        seq: Source prefix.
        m: Window size minus one.
        t: Absolute index of the top-left entry (defaults to seq.start_index).

    Raises:
        PrefixTooShort: If c_{t+2m} lies beyond the prefix.
    """
    if t is None:
        t = seq.start_index
    offset = t - seq.start_index
    if offset < 0:
        raise ShapeError(f"Index {t} precedes the window origin {seq.start_index}")
    needed = offset + 2 * m + 1
    if needed > len(seq):
        raise PrefixTooShort(needed, len(seq))
    size = m + 1
    return ExactMatrix(size, size, tuple(seq.terms[offset + i + j] for i in range(size) for j in range(size)))


def exact_det(M: ExactMatrix) -> GaussianRational:
    """
    Determinant by fraction-free (Bareiss) elimination over QQ_I.

    Every division in the elimination is exact, so intermediate entries are minors of M.
    """
    if not M.is_square:
        raise ShapeError(f"Determinant of a non-square {M.rows}x{M.cols} matrix")
    if M.rows == 0:
        return ONE
    return GaussianRational.from_domain(M.to_domain_matrix().det())


def column_rank(M: ExactMatrix) -> int:
    """Rank of M (number of pivots in exact elimination)."""
    if M.rows == 0 or M.cols == 0:
        return 0
    return M.to_domain_matrix().rank()


def kernel_basis(M: ExactMatrix) -> list:
    """
    Exact basis of the right null space of M.

    Each basis vector is scaled so its last nonzero entry is 1, the monic
    convention for recurrence coefficient vectors. Vectors come in the order of
    the free columns of the reduced row echelon form.

    Returns:
        list[tuple[GaussianRational, ...]]: Empty when M has full column rank.
    """
    if M.cols == 0:
        return []
    if M.rows == 0:
        return [tuple(ONE if i == j else ZERO for i in range(M.cols)) for j in range(M.cols)]
    basis = []
    for row in M.to_domain_matrix().nullspace().to_list():
        v = [GaussianRational.from_domain(e) for e in row]
        last = next(e for e in reversed(v) if e)
        basis.append(tuple(e / last for e in v))
    return basis


def solve(M: ExactMatrix, b: Sequence) -> tuple:
    """
    Exact solution x of M x = b.

    Raises:
        ShapeError: If M is not square or b has the wrong length.
        SingularMatrix: If M is singular.
    """
    if not M.is_square:
        raise ShapeError(f"solve needs a square matrix, got {M.rows}x{M.cols}")
    if len(b) != M.rows:
        raise ShapeError(f"Right-hand side has length {len(b)}, expected {M.rows}")
    rhs = ExactMatrix(M.rows, 1, tuple(b)).to_domain_matrix()
    reduced, pivots = M.to_domain_matrix().hstack(rhs).rref()
    if tuple(pivots) != tuple(range(M.cols)):
        raise SingularMatrix(f"Singular {M.rows}x{M.cols} system")
    return tuple(GaussianRational.from_domain(row[M.cols]) for row in reduced.to_list())


def psd_window_check(M: ExactMatrix) -> bool:
    """
    Exact positive semi-definiteness test for a real symmetric matrix.

    Pivoted LDL^T: repeatedly eliminate on a positive diagonal pivot (Schur
    complement); a negative diagonal, or a zero diagonal whose row is not zero,
    certifies indefiniteness.

    Raises:
        ShapeError: If M is not square, not symmetric, or has non-real entries.
    """
    if not M.is_square:
        raise ShapeError("PSD check needs a square matrix")
    n = M.rows
    if any(not e.is_real for e in M.entries):
        raise ShapeError("PSD check needs real entries")
    if any(M[i, j] != M[j, i] for i in range(n) for j in range(i + 1, n)):
        raise ShapeError("PSD check needs a symmetric matrix")
    a = [[M[i, j].re for j in range(n)] for i in range(n)]
    active = list(range(n))
    while active:
        if any(a[i][i] < 0 for i in active):
            return False
        pivot = next((i for i in active if a[i][i] > 0), None)
        if pivot is None:
            return all(a[i][j] == 0 for i in active for j in active)
        d = a[pivot][pivot]
        active.remove(pivot)
        for i in active:
            for j in active:
                a[i][j] -= a[i][pivot] * a[pivot][j] / d
    return True


def matrix_power(M: ExactMatrix, k: int) -> ExactMatrix:
    if not M.is_square:
        raise ShapeError("Powers need a square matrix")
    if k == 0 or M.rows == 0:
        return ExactMatrix.identity(M.rows)
    return ExactMatrix.from_domain_matrix(M.to_domain_matrix() ** k)


def trace(M: ExactMatrix) -> GaussianRational:
    if not M.is_square:
        raise ShapeError("Trace needs a square matrix")
    acc = ZERO
    for i in range(M.rows):
        acc = acc + M[i, i]
    return acc

"""
recurrence.py
-------------
Minimal linear recurrences, recurrence-ideal generators and Newton's identities.

A sequence c satisfies the monic order-r recurrence a_0..a_r (a_r = 1) when

    a_0 c_t + a_1 c_{t+1} + ... + a_r c_{t+r} = 0      for every shift t.

Only finitely many terms are ever available, so "every shift" means every shift
testable inside the prefix; the candidate order is capped at floor((N-1)/2) so an
accepted recurrence is always checked on at least one shift beyond the r shifts
used to solve for it.

The Newton half of the module converts power sums p_k = sum(beta_i ** k), k >= 1,
into elementary symmetric values e_k through

    k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} p_i,

so that sum((-1)^k e_k x^k) = prod(1 - beta_i x) whenever the power sums come from
a finite multiset.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from exact_linalg import PrefixTooShort, SequenceWindow, exact_det, hankel_window, solve
from exactnum import ONE, ZERO, DegenerateInput, ExactPoly, GaussianRational, SeqRankError, is_squarefree

logger = logging.getLogger(__name__)

MIN_TERMS = 3


class IndexConventionError(SeqRankError):
    """Raised when a window uses the wrong index origin for the requested operation."""


class NoGeneratorWithinPrefix(SeqRankError):
    """Raised when no recurrence of admissible order holds on the whole prefix."""


class RecurrenceOutcome(Enum):
    """Non-recurrence results of `minimal_recurrence`."""

    NONE_FOUND = "NoneFound"
    ZERO_SEQUENCE = "ZeroSequence"


@dataclass(frozen=True)
class Recurrence:
    """Monic recurrence coefficients a_0, ..., a_r with a_r = 1."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(GaussianRational.coerce(a) for a in self.coeffs)
        if len(coeffs) < 2:
            raise DegenerateInput("A recurrence needs order >= 1")
        if coeffs[-1] != ONE:
            raise DegenerateInput(f"Recurrence must be monic, leading coefficient is {coeffs[-1]}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def characteristic_poly(self) -> ExactPoly:
        return ExactPoly(self.coeffs)

    @classmethod
    def from_poly(cls, p: ExactPoly) -> "Recurrence":
        return cls(p.monic().coeffs)


def verify_recurrence(seq: SequenceWindow, rec: Recurrence) -> int:
    """
    Count consecutive shifts t = 0, 1, ... on which the recurrence holds exactly.

    Returns:
        int: N - r when the recurrence holds on the whole prefix, 0 if r >= N.
    """
    r = rec.order
    terms = seq.terms
    count = 0
    for t in range(len(terms) - r):
        acc = ZERO
        for i, a in enumerate(rec.coeffs):
            acc = acc + a * terms[t + i]
        if acc:
            break
        count += 1
    return count


def minimal_recurrence(seq: SequenceWindow):
    """
    Smallest-order monic recurrence holding on every testable shift.

    For r = 1, 2, ..., floor((N-1)/2): skip r when the r x r leading Hankel window
    C is singular, otherwise solve C a = -(c_r, ..., c_{2r-1}) and keep the first
    candidate that survives all N - r shifts.

    Args:
        seq: Prefix with at least three terms.

    Returns:
        Recurrence | RecurrenceOutcome: The recurrence, `ZERO_SEQUENCE` for the
        all-zero prefix, or `NONE_FOUND` when the prefix is exhausted.

    Raises:
        PrefixTooShort: If fewer than three terms are supplied.
    """
    n_terms = len(seq)
    if n_terms < MIN_TERMS:
        raise PrefixTooShort(MIN_TERMS, n_terms)
    if seq.is_zero:
        logger.info(f"All {n_terms} terms vanish; reporting the zero sequence")
        return RecurrenceOutcome.ZERO_SEQUENCE

    cap = (n_terms - 1) // 2
    for r in range(1, cap + 1):
        window = hankel_window(seq, r - 1)
        if not exact_det(window):
            logger.debug(f"[order {r}] leading Hankel window is singular, skipping")
            continue
        a = solve(window, [-seq.terms[r + i] for i in range(r)])
        rec = Recurrence(a + (ONE,))
        shifts = verify_recurrence(seq, rec)
        if shifts == n_terms - r:
            logger.info(f"[order {r}] recurrence verified on {shifts} shifts")
            return rec
        logger.debug(f"[order {r}] candidate breaks at shift {shifts}")

    logger.info(f"No recurrence of order <= {cap} holds on the {n_terms}-term prefix")
    return RecurrenceOutcome.NONE_FOUND


def ideal_generator(seq: SequenceWindow) -> ExactPoly:
    """
    Generator of the recurrence ideal: the characteristic polynomial of the
    minimal recurrence.

    The zero sequence is annihilated by every polynomial, so its ideal is the
    whole ring and the generator is the constant 1 (degree 0, rank 0).

    Raises:
        NoGeneratorWithinPrefix: If no recurrence is found within the prefix.
    """
    outcome = minimal_recurrence(seq)
    if outcome is RecurrenceOutcome.ZERO_SEQUENCE:
        return ExactPoly.constant(1)
    if outcome is RecurrenceOutcome.NONE_FOUND:
        raise NoGeneratorWithinPrefix(f"No generator of degree <= {(len(seq) - 1) // 2} within {len(seq)} terms")
    return outcome.characteristic_poly()


def is_radical(seq: SequenceWindow) -> bool:
    """True iff the recurrence ideal is radical, i.e. its generator is squarefree."""
    generator = ideal_generator(seq)
    return generator.degree == 0 or is_squarefree(generator)


@dataclass(frozen=True)
class NewtonPoly:
    """
    Elementary symmetric values e_0 = 1, e_1, ..., e_N computed from N power sums.
    """

    elementary: tuple
    source_length: int

    def __post_init__(self):
        elementary = tuple(GaussianRational.coerce(e) for e in self.elementary)
        if not elementary or elementary[0] != ONE:
            raise DegenerateInput("Newton polynomial must start with e_0 = 1")
        object.__setattr__(self, "elementary", elementary)

    def candidate_rank(self) -> int:
        """Largest r with e_r != 0 (all later e_k vanish)."""
        return max(k for k, e in enumerate(self.elementary) if e)

    def reciprocal_poly(self) -> ExactPoly:
        """sum((-1)^k e_k x^k), i.e. prod(1 - beta_i x) for a finite multiset."""
        return ExactPoly(tuple(e if k % 2 == 0 else -e for k, e in enumerate(self.elementary)))

    def characteristic_poly(self, r: int | None = None) -> ExactPoly:
        """prod(x - beta_i): the degree-r reversal of the reciprocal polynomial."""
        if r is None:
            r = self.candidate_rank()
        signed = [e if k % 2 == 0 else -e for k, e in enumerate(self.elementary[: r + 1])]
        return ExactPoly(tuple(reversed(signed)))


def power_sums_to_newton(seq: SequenceWindow) -> NewtonPoly:
    """
    Newton's identities on the power sums c_1, ..., c_N.

    Raises:
        IndexConventionError: If the window does not start at index 1.
    """
    if seq.start_index != 1:
        raise IndexConventionError(f"Power sums are indexed from 1, window starts at {seq.start_index}")
    p = seq.terms
    e = [ONE]
    for k in range(1, len(p) + 1):
        acc = ZERO
        for i in range(1, k + 1):
            term = e[k - i] * p[i - 1]
            acc = acc + term if i % 2 else acc - term
        e.append(acc / k)
    return NewtonPoly(tuple(e), len(p))


def newton_tail_check(newton: NewtonPoly, seq: SequenceWindow, r: int) -> bool:
    """
    Check p_k = sum_{i=1..r} (-1)^(i-1) e_i p_{k-i} for every available k > r.

    Vacuously true when r >= N.
    """
    p = seq.terms
    e = newton.elementary
    for k in range(r + 1, len(p) + 1):
        expected = ZERO
        for i in range(1, r + 1):
            term = e[i] * p[k - i - 1]
            expected = expected + term if i % 2 else expected - term
        if expected != p[k - 1]:
            logger.debug(f"Newton tail breaks at p_{k}: expected {expected}, have {p[k - 1]}")
            return False
    return True

"""
analytic.py
-----------
The numeric and structural boundary of the rank library.

This module:
1. Finds polynomial roots: exactly from the linear factors over Q(i), and by
   simultaneous Aberth-Ehrlich iteration for irreducible factors of higher degree.
2. Recovers the finite atomic measure behind a moment sequence and runs the
   forward model (`moments`) used as the oracle throughout the tests.
3. Factors Hankel windows as V^T D V (Vandermonde decomposition) and, for power
   sums, as the Gramian V^T V of the multiset Vandermonde matrix.
4. Builds and verifies the binary forms sum_j C(2r, j) c_{j+t} x^(2r-j) y^j
   together with their Waring decompositions.
5. Rebuilds the rational ordinary generating function of a recurrent sequence.

Multiplicity questions are never decided numerically: simplicity always comes
from the exact squarefree test in `exactnum`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from math import comb

import numpy as np
from scipy.linalg import hankel

from exact_linalg import (
    ExactMatrix,
    PrefixTooShort,
    SequenceWindow,
    ShapeError,
    hankel_window,
    psd_window_check,
)
from exactnum import (
    ONE,
    ZERO,
    DegenerateInput,
    ExactPoly,
    GaussianRational,
    SeqRankError,
    irreducible_factors,
    is_squarefree,
    poly_gcd,
    squarefree_decomposition,
)
from ranks import ModifiedVandermonde, atom_sort_key, mrank, rrank, scalar_to_dict, urank
from recurrence import IndexConventionError
from settings import config

logger = logging.getLogger(__name__)


class RootFindingFailed(SeqRankError):
    """Raised when the root iteration or a numeric reconstruction misses its tolerance."""


class NotGramian(SeqRankError):
    """Raised when a sequence cannot carry a real Vandermonde Gramian factorization."""


# --- roots ---------------------------------------------------------------------


def _initial_guesses(coeffs: np.ndarray, attempt: int) -> np.ndarray:
    """Points on the Cauchy-bound circle, rotated off the real axis per attempt."""
    n = len(coeffs) - 1
    radius = 1.0 + np.max(np.abs(coeffs[1:] / coeffs[0]))
    offset = 0.4 + 0.7 * attempt
    angles = 2 * np.pi * np.arange(n) / n + offset
    # shrink the circle on restarts so guesses do not repeat
    return radius / (1 + attempt) * np.exp(1j * angles)


def _aberth(coeffs: np.ndarray, z: np.ndarray, tol: float, max_iter: int):
    deriv = np.polyder(coeffs)
    for _ in range(max_iter):
        pz = np.polyval(coeffs, z)
        dpz = np.polyval(deriv, z)
        dpz = np.where(dpz == 0, tol, dpz)
        ratio = pz / dpz
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        repulsion = np.sum(1.0 / diff, axis=1)
        step = ratio / (1.0 - ratio * repulsion)
        z = z - step
        if not np.all(np.isfinite(z)):
            return z, False
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
            return z, True
    return z, False


def _residual_ok(coeffs: np.ndarray, z: np.ndarray, tol: float) -> bool:
    """|p(z)| <= tol * sum(|a_k| |z|^k) at every root."""
    scale = np.polyval(np.abs(coeffs), np.abs(z))
    return bool(np.all(np.abs(np.polyval(coeffs, z)) <= tol * np.maximum(scale, 1.0)))


def find_roots(p: ExactPoly, tol: float | None = None) -> list:
    """
    All complex roots of p by Aberth-Ehrlich iteration.

    Args:
        p: Polynomial of degree >= 1.
        tol: Relative step / residual tolerance (defaults to SEQRANK_TOL).

    Returns:
        list[complex]: Roots with repetition, ordered by magnitude then phase.

    Raises:
        DegenerateInput: If p is constant.
        RootFindingFailed: If no restart converges to certified roots.
    """
    if p.is_zero or p.degree < 1:
        raise DegenerateInput("Root finding needs degree >= 1")
    tol = config("SEQRANK_TOL") if tol is None else tol
    coeffs = p.to_numpy()[::-1]
    coeffs = coeffs / coeffs[0]
    if p.degree == 1:
        return [complex(-coeffs[1])]

    max_iter = config("ROOT_MAX_ITER")
    restarts = config("ROOT_RESTARTS")
    for attempt in range(restarts + 1):
        z, converged = _aberth(coeffs, _initial_guesses(coeffs, attempt), tol, max_iter)
        if np.all(np.isfinite(z)) and (converged or _residual_ok(coeffs, z, tol)):
            break
        logger.warning(f"Aberth iteration stalled for {p} (attempt {attempt + 1}); restarting")
    else:
        raise RootFindingFailed(f"No convergence for {p} after {restarts + 1} attempts of {max_iter} iterations")

    # one Newton polish per root on the monic polynomial
    deriv = np.polyder(coeffs)
    dpz = np.polyval(deriv, z)
    safe = dpz != 0
    z = np.where(safe, z - np.polyval(coeffs, z) / np.where(safe, dpz, 1.0), z)
    if not _residual_ok(coeffs, z, tol):
        raise RootFindingFailed(f"Roots of {p} fail the residual certificate at tol={tol:g}")
    return sorted((complex(w) for w in z), key=atom_sort_key)


def exact_roots(p: ExactPoly) -> list | None:
    """
    Roots of p (with multiplicity) as Gaussian rationals, or None when some
    root is not one.

    The roots are read off the linear factors of the factorisation of p into
    irreducibles over Q(i); any irreducible factor of degree 2 or more means p
    does not split there.
    """
    if p.degree == 1:
        return [-p[0] / p[1]]
    roots = []
    for factor, multiplicity in irreducible_factors(p):
        if factor.degree > 1:
            return None
        roots.extend([-factor[0]] * multiplicity)
    return sorted(roots, key=atom_sort_key)


def characteristic_roots(p: ExactPoly, tol: float | None = None):
    """
    Roots of p, exact when possible.

    Linear factors over Q(i) give exact roots. If an irreducible factor of
    degree 2 or more remains, only that factor goes through Aberth iteration and
    the whole root list is reported numerically.

    Returns:
        tuple[list, bool]: The roots (ordered by magnitude then phase) and
        whether they are exact GaussianRational values.
    """
    factors = irreducible_factors(p)
    exact, irrational = [], []
    for factor, multiplicity in factors:
        if factor.degree == 1:
            exact.extend([-factor[0]] * multiplicity)
        else:
            irrational.append((factor, multiplicity))
    if not irrational:
        return sorted(exact, key=atom_sort_key), True
    logger.info(f"{p} has {len(irrational)} irreducible factor(s) of degree >= 2; using numeric atoms")
    roots = [complex(z) for z in exact]
    for factor, multiplicity in irrational:
        roots.extend(find_roots(factor, tol) * multiplicity)
    return sorted(roots, key=atom_sort_key), False


# --- measures ------------------------------------------------------------------


class Convention(str, Enum):
    """Indexing of moments: c_n = sum(m * beta ** (n + 1)) from n = 0, or sum(m * beta ** n) from n = 1."""

    MOMENT_RANK = "moment-rank"
    UNITARY_RANK = "unitary-rank"

    @property
    def start_index(self) -> int:
        return 0 if self is Convention.MOMENT_RANK else 1

    def exponent(self, n: int) -> int:
        return n + 1 if self is Convention.MOMENT_RANK else n


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite measure sum(mass_i * delta(atom_i)) with distinct nonzero atoms."""

    support: tuple
    masses: tuple

    def __post_init__(self):
        support = tuple(self.support)
        masses = tuple(self.masses)
        if len(support) != len(masses):
            raise ShapeError(f"{len(support)} atoms but {len(masses)} masses")
        if any(isinstance(a, GaussianRational) and not a for a in support):
            raise DegenerateInput("Atoms must be nonzero")
        if any(isinstance(m, GaussianRational) and not m for m in masses):
            raise DegenerateInput("Masses must be nonzero")
        exact_atoms = [a for a in support if isinstance(a, GaussianRational)]
        if len(set(exact_atoms)) != len(exact_atoms):
            raise DegenerateInput("Atoms must be pairwise distinct")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "masses", masses)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, GaussianRational) for v in self.support + self.masses)

    def to_dict(self) -> dict:
        return {
            "atoms": [scalar_to_dict(a) for a in self.support],
            "masses": [scalar_to_dict(m) for m in self.masses],
        }


def moments(mu: AtomicMeasure, count: int, convention: Convention = Convention.MOMENT_RANK) -> SequenceWindow:
    """
    Exact forward moments of an exact measure.

    Examples:
        2*delta(3), moment-rank, 4 terms  -> (6, 18, 54, 162)
        delta(2) + delta(3), unitary, 4 terms -> (5, 13, 35, 97)

    Raises:
        TypeError: If the measure carries numeric atoms or masses (use `numeric_moments`).
    """
    if not mu.is_exact:
        raise TypeError("moments() needs an exact measure; use numeric_moments()")
    convention = Convention(convention)
    terms = []
    for n in range(convention.start_index, convention.start_index + count):
        acc = ZERO
        for atom, mass in zip(mu.support, mu.masses):
            acc = acc + mass * atom ** convention.exponent(n)
        terms.append(acc)
    return SequenceWindow(convention.start_index, tuple(terms))


def numeric_moments(mu: AtomicMeasure, count: int, convention: Convention = Convention.MOMENT_RANK) -> np.ndarray:
    convention = Convention(convention)
    if not mu.support:
        return np.zeros(count, dtype=complex)
    atoms = np.array([complex(a) for a in mu.support], dtype=complex)
    masses = np.array([complex(m) for m in mu.masses], dtype=complex)
    exponents = np.array([convention.exponent(n) for n in range(convention.start_index, convention.start_index + count)])
    return (atoms[None, :] ** exponents[:, None]) @ masses


def recover_measure(seq: SequenceWindow, tol: float | None = None) -> AtomicMeasure:
    """
    Atoms and masses whose moments are the given prefix.

    Index-0 windows use c_n = sum(alpha_i beta_i^(n+1)); index-1 windows are read
    as power-sum data c_n = sum(alpha_i beta_i^n) by running the moment-rank
    algorithm on the shifted sequence.

    Raises:
        RankFailure: ErrorNotSimple or NoFiniteRankWithinPrefix.
    """
    cert = mrank(seq if seq.start_index == 0 else seq.shift(), tol).raise_for_status()
    return AtomicMeasure(cert.atoms, cert.masses)


# --- Hankel factorizations -------------------------------------------------------


@dataclass(frozen=True)
class VandermondeFactorization:
    """H = V^T diag(D) V with V an exact or numeric r x window Vandermonde matrix."""

    V: object
    D: tuple
    residual: float
    exact: bool


def vandermonde_factor(seq: SequenceWindow, window: int | None = None, tol: float | None = None) -> VandermondeFactorization:
    """
    Non-degenerate Vandermonde decomposition of the leading window x window Hankel matrix.

    V has entries beta_i^j (j = 0..window-1) and D = alpha_i * beta_i; the residual
    is the largest entry error of V^T D V relative to the window (0 when exact).

    Raises:
        RankFailure: If mrank does not certify.
        ShapeError: If window < rank.
        PrefixTooShort: If the prefix does not cover the window.
    """
    cert = mrank(seq, tol).raise_for_status()
    r = cert.rank
    window = max(r, 1) if window is None else window
    if window < r:
        raise ShapeError(f"Window {window} is smaller than the rank {r}")
    target = hankel_window(seq, window - 1)
    basis = ModifiedVandermonde(cert.atoms)
    diagonal = tuple(a * b for a, b in zip(cert.masses, cert.atoms))

    if cert.exact:
        V = basis.exact_matrix(cols=window, shifted=False)
        rebuilt = V.transpose() @ ExactMatrix.diagonal(diagonal) @ V if r else ExactMatrix.zeros(window, window)
        residual = 0.0 if rebuilt == target else float(np.max(np.abs(rebuilt.to_numpy() - target.to_numpy())))
        return VandermondeFactorization(V, diagonal, residual, True)

    V = basis.numeric_matrix(cols=window, shifted=False)
    rebuilt = V.T @ np.diag(np.array(diagonal, dtype=complex)) @ V
    c = seq.to_numpy()
    reference = hankel(c[:window], c[window - 1 : 2 * window - 1])
    residual = float(np.max(np.abs(rebuilt - reference)) / max(1.0, float(np.max(np.abs(reference)))))
    logger.info(f"Numeric Vandermonde factor of a {window}x{window} window, residual {residual:.3e}")
    return VandermondeFactorization(V, diagonal, residual, False)


@dataclass(frozen=True)
class GramianFactorization:
    """Augmented Hankel window H' = V^T V with V the multiset Vandermonde matrix."""

    V: object
    window_matrix: ExactMatrix
    psd: bool
    residual: float
    exact: bool


def gramian_factor(
    seq: SequenceWindow, window: int | None = None, tol: float | None = None, t: int = 0
) -> GramianFactorization:
    """
    Gramian factorization of power sums with c'_0 = r prepended.

    The default window is r x r. V repeats the row (1, beta, beta^2, ...) once per
    unit of multiplicity. At shift t the window with top-left entry c'_t is
    rebuilt as V^T diag(beta^t) V (plain transpose); at t = 0 this is V^T V, and
    the PSD check on that window passes exactly when every atom is real.

    Raises:
        IndexConventionError: If the window does not start at index 1.
        NotGramian: If the sequence has non-real terms.
        RankFailure: If urank does not certify.
        PrefixTooShort: If the shifted window runs past the prefix.
    """
    if seq.start_index != 1:
        raise IndexConventionError(f"Power sums are indexed from 1, window starts at {seq.start_index}")
    if not seq.is_real:
        raise NotGramian("Gramian factorization needs a real sequence")
    cert = urank(seq, tol).raise_for_status()
    r = cert.rank
    window = max(r, 1) if window is None else window
    augmented = seq.augmented(r)
    H = hankel_window(augmented, window - 1, t)
    rows = [a for a, m in zip(cert.atoms, cert.masses) for _ in range(int(m.re))]
    psd = psd_window_check(H)
    if not psd and t == 0:
        logger.warning(f"Augmented window of rank {r} is not PSD: the atoms are not all real")

    if cert.exact:
        V = ModifiedVandermonde(tuple(rows)).exact_matrix(cols=window, shifted=False)
        if rows:
            rebuilt = V.transpose() @ ExactMatrix.diagonal(tuple(a**t for a in rows)) @ V
        else:
            rebuilt = ExactMatrix.zeros(window, window)
        residual = 0.0 if rebuilt == H else float(np.max(np.abs(rebuilt.to_numpy() - H.to_numpy())))
        return GramianFactorization(V, H, psd, residual, True)

    V = ModifiedVandermonde(tuple(rows)).numeric_matrix(cols=window, shifted=False)
    weights = np.array([complex(a) for a in rows], dtype=complex) ** t
    target = H.to_numpy()
    residual = float(np.max(np.abs(V.T @ np.diag(weights) @ V - target)) / max(1.0, float(np.max(np.abs(target)))))
    return GramianFactorization(V, H, psd, residual, False)


# --- binary forms ------------------------------------------------------------------


@dataclass(frozen=True)
class WaringForm:
    """
    Binary form sum_j coeff[j] x^(2r'-j) y^j with coeff[j] = C(2r', j) c_{j+t},
    and optionally its decomposition into (lambda_j, alpha_j, beta_j) triples,
    each standing for lambda_j (beta_j/alpha_j)^t (alpha_j x + beta_j y)^(2r').
    """

    r_prime: int
    t: int
    coeff: tuple
    decomposition: tuple = ()


def waring_build(seq: SequenceWindow, r_prime: int, t: int | None = None) -> WaringForm:
    """
    Raises:
        PrefixTooShort: If c_t..c_{t+2r'} are not all available.
    """
    if t is None:
        t = seq.start_index
    offset = t - seq.start_index
    needed = offset + 2 * r_prime + 1
    if offset < 0 or needed > len(seq):
        raise PrefixTooShort(needed, len(seq))
    coeff = tuple(seq.terms[offset + j] * comb(2 * r_prime, j) for j in range(2 * r_prime + 1))
    return WaringForm(r_prime, t, coeff)


def waring_decompose(
    form: WaringForm, mu: AtomicMeasure, convention: Convention = Convention.MOMENT_RANK
) -> WaringForm:
    """
    Fill in the decomposition with alpha_j = 1, beta_j = atom_j and the weight
    the measure fixes for each atom.

    Under the moment-rank convention c_n = sum(mass * atom ** (n + 1)), so
    lambda_j = mass_j * atom_j; power sums c_n = sum(mass * atom ** n) give
    lambda_j = mass_j. Either way lambda_j does not depend on t.
    """
    convention = Convention(convention)
    unit = ONE if mu.is_exact else 1.0
    decomposition = []
    for mass, atom in zip(mu.masses, mu.support):
        if not mu.is_exact:
            mass, atom = complex(mass), complex(atom)
        lam = mass * atom if convention is Convention.MOMENT_RANK else mass
        decomposition.append((lam, unit, atom))
    return WaringForm(form.r_prime, form.t, form.coeff, tuple(decomposition))


def waring_expand(form: WaringForm) -> tuple:
    """
    Coefficients of sum_j lambda_j (beta_j/alpha_j)^t (alpha_j x + beta_j y)^(2r'),
    in the order x^(2r'), x^(2r'-1) y, ..., y^(2r').
    """
    exact = all(isinstance(v, GaussianRational) for triple in form.decomposition for v in triple)
    expanded = []
    for k in range(2 * form.r_prime + 1):
        acc = ZERO if exact else 0j
        for lam, alpha, beta in form.decomposition:
            acc = acc + lam * (beta / alpha) ** form.t * alpha ** (2 * form.r_prime - k) * beta**k
        expanded.append(acc * comb(2 * form.r_prime, k))
    return tuple(expanded)


def waring_verify(
    form: WaringForm, mu: AtomicMeasure, convention: Convention = Convention.MOMENT_RANK
) -> bool:
    """
    True iff the decomposition fixed by `mu` (see `waring_decompose`) expands
    back to every one of the 2r'+1 coefficients of `form`: exactly on the exact
    path, within RESIDUAL_TOL (relative) on the numeric path.

    A measure with the right atoms but the wrong masses fails.
    """
    expanded = waring_expand(waring_decompose(form, mu, convention))
    if mu.is_exact:
        matches = expanded == form.coeff
    else:
        tol = config("RESIDUAL_TOL")
        matches = all(
            abs(complex(e) - complex(c)) <= tol * max(1.0, abs(complex(c))) for e, c in zip(expanded, form.coeff)
        )
    if not matches:
        logger.info(f"Waring form of degree {2 * form.r_prime} at t={form.t} is not reproduced by {len(mu.support)} atoms")
    return matches


# --- generating functions ---------------------------------------------------------


@dataclass(frozen=True)
class RationalGenFun:
    """
    Phi(z) = numerator / denominator with denominator(0) = 1.

    `factors` is the squarefree factorization of the denominator (each factor
    scaled to constant term 1); `poles` lists (pole, multiplicity).
    """

    numerator: ExactPoly
    denominator: ExactPoly
    poles: tuple
    simple: bool
    order: int
    factors: tuple = ()

    def series_coefficients(self, count: int) -> tuple:
        """First `count` power-series coefficients of numerator / denominator."""
        out = []
        for k in range(count):
            acc = self.numerator[k]
            for i in range(1, min(k, self.denominator.degree) + 1):
                acc = acc - self.denominator[i] * out[k - i]
            out.append(acc)
        return tuple(out)

    def format(self, var: str = "z") -> str:
        num = self.numerator.format(var, ascending=True)
        if sum(1 for c in self.numerator.coeffs if c) > 1:
            num = f"({num})"
        if self.denominator.degree == 0:
            return num
        den = "".join(
            f"({f.format(var, ascending=True)})" + (f"^{m}" if m > 1 else "") for f, m in self.factors
        )
        return f"{num} / {den}"


def genfun(seq: SequenceWindow, tol: float | None = None) -> RationalGenFun:
    """
    Rational ordinary generating function Phi(z) = sum(c_n z^n), n running from
    the window's start index.

    With p the monic minimal characteristic polynomial of degree r, the
    denominator is its reversal prod(1 - beta_i z) and the numerator is
    z^start times the truncation below degree r of
    (sum_k c_(start+k) z^k) * denominator(z). For power sums indexed from 1
    the numerator therefore vanishes at z = 0.

    Raises:
        RankFailure: If no recurrence is certified within the prefix.
    """
    cert = rrank(seq).raise_for_status()
    if cert.zero_sequence:
        return RationalGenFun(ExactPoly(), ExactPoly.constant(1), (), True, 0)
    p = cert.char_poly
    r = p.degree
    denominator = p.reciprocal()
    numerator = ExactPoly(
        tuple(
            sum((denominator[j - k] * seq.terms[k] for k in range(j + 1)), ZERO)
            for j in range(r)
        )
    ) * ExactPoly.monomial(seq.start_index)
    common = poly_gcd(numerator, denominator) if not numerator.is_zero else ExactPoly.constant(1)
    if common.degree > 0:
        logger.info(f"Cancelling common factor {common} from the generating function")
        numerator, denominator = numerator // common, denominator // common
        scale = ONE / denominator[0]
        numerator, denominator = numerator.scale(scale), denominator.scale(scale)

    factors, poles = [], []
    for factor, multiplicity in squarefree_decomposition(denominator):
        factors.append((factor.scale(ONE / factor[0]), multiplicity))
        roots, _ = characteristic_roots(factor, tol)
        poles.extend((root, multiplicity) for root in roots)
    poles.sort(key=lambda pm: atom_sort_key(pm[0]))
    simple = r < 2 or is_squarefree(p)
    if not simple:
        logger.warning(f"Generating function poles are not simple: {p} has a repeated root")
    return RationalGenFun(numerator, denominator, tuple(poles), simple, r, tuple(factors))

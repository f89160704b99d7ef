"""
ranks.py
--------
Recurrence rank, moment rank and unitary rank with full certificates.

This module:
1. Computes the recurrence rank (`rrank`): order of the minimal recurrence,
   repeated characteristic roots allowed.
2. Runs the moment-rank algorithm (`mrank`): minimal recurrence, reject repeated
   or zero characteristic roots, then solve the modified Vandermonde system for
   the masses so that c_n = sum(alpha_i * beta_i ** (n + 1)).
3. Computes the unitary rank (`urank`) of power sums c_n = sum(beta_i ** n), n >= 1,
   along two independent paths: exact Newton identities, and the moment-rank
   algorithm on the shifted sequence with integer-mass acceptance.
4. Reports Hankel nullity profiles and cross-checks the equivalent rank
   characterisations (`tfae_crosscheck`).

Rank outcomes are never raised: every operation returns a RankCertificate whose
`status` records success or the reason for failure. `raise_for_status()` turns a
failed certificate into the matching RankFailure exception.
"""

from __future__ import annotations

import cmath
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
import pandas as pd

from exact_linalg import (
    ExactMatrix,
    PrefixTooShort,
    SequenceWindow,
    column_rank,
    exact_det,
    hankel_window,
    kernel_basis,
    solve,
)
from exactnum import GaussianRational, ExactPoly, SeqRankError, discriminant, is_squarefree, squarefree_decomposition
from recurrence import (
    MIN_TERMS,
    IndexConventionError,
    NoGeneratorWithinPrefix,
    RecurrenceOutcome,
    ideal_generator,
    is_radical,
    minimal_recurrence,
    newton_tail_check,
    power_sums_to_newton,
    verify_recurrence,
)
from settings import config

logger = logging.getLogger(__name__)


class RankKind(str, Enum):
    RECURRENCE = "recurrence"
    MOMENT = "moment"
    UNITARY = "unitary"


class RankStatus(str, Enum):
    CERTIFIED = "Certified"
    ERROR_NOT_SIMPLE = "ErrorNotSimple"
    NO_FINITE_RANK = "NoFiniteRankWithinPrefix"
    NON_INTEGER_MASSES = "NonIntegerMasses"

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self]


_EXIT_CODES = {
    RankStatus.CERTIFIED: 0,
    RankStatus.ERROR_NOT_SIMPLE: 2,
    RankStatus.NO_FINITE_RANK: 3,
    RankStatus.NON_INTEGER_MASSES: 4,
}


class RankFailure(SeqRankError):
    """A rank computation ended without a certificate of finite rank."""

    def __init__(self, certificate: "RankCertificate"):
        self.certificate = certificate
        super().__init__(
            f"{certificate.kind.value} rank: {certificate.status.value}"
            + (f" ({certificate.detail})" if certificate.detail else "")
        )

    def __reduce__(self):
        return (type(self), (self.certificate,))


class ErrorNotSimple(RankFailure):
    """The minimal recurrence has a repeated characteristic root."""


class NoFiniteRankWithinPrefix(RankFailure):
    """No admissible rank is certified by the available terms."""


class NonIntegerMasses(RankFailure):
    """The shifted moment-rank path found masses that are not positive integers."""


class PathDisagreement(SeqRankError):
    """The exact Newton path and the shifted moment-rank path contradict each other."""


class NullityMismatch(SeqRankError):
    """A Hankel window nullity differs from max(0, m - r + 1)."""

    def __init__(self, rank: int, m: int, expected: int, found: int, profile: list):
        self.rank, self.m, self.expected, self.found, self.profile = rank, m, expected, found, profile
        super().__init__(f"nul H_{m} = {found}, closed form gives {expected} for rank {rank}")

    def __reduce__(self):
        return (type(self), (self.rank, self.m, self.expected, self.found, self.profile))



_FAILURES = {
    RankStatus.ERROR_NOT_SIMPLE: ErrorNotSimple,
    RankStatus.NO_FINITE_RANK: NoFiniteRankWithinPrefix,
    RankStatus.NON_INTEGER_MASSES: NonIntegerMasses,
}


def atom_sort_key(z) -> tuple:
    """Deterministic atom order: magnitude, then phase in [0, 2*pi)."""
    w = complex(z)
    # rounded so that roots of equal modulus do not reorder on float noise
    magnitude = round(abs(w), 9)
    if abs(w.imag) <= 1e-12 * max(1.0, abs(w)):
        return (magnitude, 0.0 if w.real >= 0 else round(math.pi, 9))
    return (magnitude, round(cmath.phase(w) % (2 * math.pi), 9))


def scalar_to_dict(z) -> dict:
    """{re, im} as 17-significant-digit strings plus the exact literal when there is one."""
    w = complex(z)
    return {
        "re": format(w.real, ".17g"),
        "im": format(w.imag, ".17g"),
        "exact": str(z) if isinstance(z, GaussianRational) else None,
    }


def scalar_from_dict(data: dict):
    if data.get("exact") is not None:
        return GaussianRational.parse(data["exact"])
    return complex(float(data["re"]), float(data["im"]))


@dataclass(frozen=True)
class RankCertificate:
    """
    Outcome of a rank computation.

    `atoms` and `masses` hold GaussianRational values on the exact path and
    Python complex numbers on the numeric path; `exact` says which.
    """

    kind: RankKind
    status: RankStatus
    rank: int | None = None
    char_poly: ExactPoly | None = None
    atoms: tuple = ()
    masses: tuple = ()
    verified_shifts: int = 0
    zero_sequence: bool = False
    exact: bool = True
    residual: float = 0.0
    start_index: int = 0
    term_count: int = 0
    detail: str = ""

    @property
    def certified(self) -> bool:
        return self.status is RankStatus.CERTIFIED

    def raise_for_status(self) -> "RankCertificate":
        if not self.certified:
            raise _FAILURES[self.status](self)
        return self

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "status": self.status.value,
            "rank": self.rank,
            "char_poly": None if self.char_poly is None else [str(c) for c in self.char_poly.coeffs],
            "char_poly_display": None if self.char_poly is None else self.char_poly.format(),
            "atoms": [scalar_to_dict(a) for a in self.atoms],
            "masses": [scalar_to_dict(m) for m in self.masses],
            "verified_shifts": self.verified_shifts,
            "zero_sequence": self.zero_sequence,
            "exact": self.exact,
            "residual": self.residual,
            "start_index": self.start_index,
            "term_count": self.term_count,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RankCertificate":
        return cls(
            kind=RankKind(data["kind"]),
            status=RankStatus(data["status"]),
            rank=data["rank"],
            char_poly=None if data["char_poly"] is None else ExactPoly(tuple(data["char_poly"])),
            atoms=tuple(scalar_from_dict(a) for a in data["atoms"]),
            masses=tuple(scalar_from_dict(m) for m in data["masses"]),
            verified_shifts=data["verified_shifts"],
            zero_sequence=data["zero_sequence"],
            exact=data["exact"],
            residual=data["residual"],
            start_index=data["start_index"],
            term_count=data["term_count"],
            detail=data["detail"],
        )


@dataclass(frozen=True)
class ModifiedVandermonde:
    """
    Vandermonde matrices over the atoms beta_i (rows) and powers (columns):
    entry beta_i ** (j + 1) in the modified (shifted) form, beta_i ** j otherwise,
    for j = 0, 1, ...
    """

    betas: tuple

    @property
    def exact(self) -> bool:
        return all(isinstance(b, GaussianRational) for b in self.betas)

    def exact_matrix(self, cols: int | None = None, shifted: bool = True) -> ExactMatrix:
        cols = len(self.betas) if cols is None else cols
        first = 1 if shifted else 0
        return ExactMatrix(
            len(self.betas),
            cols,
            tuple(b ** (j + first) for b in self.betas for j in range(cols)),
        )

    def numeric_matrix(self, cols: int | None = None, shifted: bool = True) -> np.ndarray:
        cols = len(self.betas) if cols is None else cols
        first = 1 if shifted else 0
        betas = np.array([complex(b) for b in self.betas], dtype=complex)
        return betas[:, None] ** (np.arange(cols) + first)[None, :]

    def solve_masses(self, leading_terms) -> tuple:
        """alpha with sum_i alpha_i beta_i ** (j + 1) = c_j for j < r."""
        if self.exact:
            return solve(self.exact_matrix().transpose(), list(leading_terms))
        rhs = np.array([complex(c) for c in leading_terms], dtype=complex)
        return tuple(complex(a) for a in np.linalg.solve(self.numeric_matrix().T, rhs))


def _zero_certificate(kind: RankKind, seq: SequenceWindow) -> RankCertificate:
    return RankCertificate(
        kind=kind,
        status=RankStatus.CERTIFIED,
        rank=0,
        char_poly=ExactPoly.constant(1),
        verified_shifts=len(seq),
        zero_sequence=True,
        start_index=seq.start_index,
        term_count=len(seq),
        detail="zero sequence: rank 0, empty measure",
    )


def _failed(kind: RankKind, status: RankStatus, seq: SequenceWindow, **fields) -> RankCertificate:
    cert = RankCertificate(kind=kind, status=status, start_index=seq.start_index, term_count=len(seq), **fields)
    logger.info(f"[{kind.value}] {status.value}: {cert.detail}")
    return cert


def _characteristic_roots(p: ExactPoly, tol: float | None):
    # analytic imports this module, so its root finders are resolved at call time
    from analytic import characteristic_roots

    return characteristic_roots(p, tol)


def rrank(seq: SequenceWindow) -> RankCertificate:
    """
    Recurrence rank: order of the minimal recurrence.

    Args:
        seq: Prefix with at least three terms (any index origin).

    Returns:
        RankCertificate: Certified with the generator as `char_poly`, or
        NoFiniteRankWithinPrefix.
    """
    outcome = minimal_recurrence(seq)
    if outcome is RecurrenceOutcome.ZERO_SEQUENCE:
        return _zero_certificate(RankKind.RECURRENCE, seq)
    if outcome is RecurrenceOutcome.NONE_FOUND:
        return _failed(
            RankKind.RECURRENCE,
            RankStatus.NO_FINITE_RANK,
            seq,
            detail=f"no recurrence of order <= {(len(seq) - 1) // 2} within {len(seq)} terms",
        )
    return RankCertificate(
        kind=RankKind.RECURRENCE,
        status=RankStatus.CERTIFIED,
        rank=outcome.order,
        char_poly=outcome.characteristic_poly(),
        verified_shifts=verify_recurrence(seq, outcome),
        start_index=seq.start_index,
        term_count=len(seq),
    )


def mrank(seq: SequenceWindow, tol: float | None = None) -> RankCertificate:
    """
    Moment rank: smallest r with c_n = sum(alpha_i * beta_i ** (n + 1)) over
    distinct nonzero atoms beta_i and nonzero masses alpha_i.

    Atoms and masses are exact when every characteristic root is a Gaussian
    rational; otherwise they come from the numeric root finder and the
    reconstruction residual must stay below RESIDUAL_TOL.

    Args:
        seq: Prefix indexed from 0 with at least three terms.
        tol: Root-finding tolerance (defaults to SEQRANK_TOL).

    Returns:
        RankCertificate: Certified, ErrorNotSimple or NoFiniteRankWithinPrefix
        (also used when the characteristic polynomial vanishes at 0).

    Raises:
        IndexConventionError: If the window does not start at index 0.
        RootFindingFailed: If the numeric reconstruction misses the tolerance.
    """
    from analytic import RootFindingFailed

    if seq.start_index != 0:
        raise IndexConventionError(f"Moment rank expects index origin 0, window starts at {seq.start_index}")
    n_terms = len(seq)
    outcome = minimal_recurrence(seq)
    if outcome is RecurrenceOutcome.ZERO_SEQUENCE:
        return _zero_certificate(RankKind.MOMENT, seq)
    if outcome is RecurrenceOutcome.NONE_FOUND:
        return _failed(
            RankKind.MOMENT,
            RankStatus.NO_FINITE_RANK,
            seq,
            detail=f"no recurrence of order <= {(n_terms - 1) // 2} within {n_terms} terms",
        )

    p = outcome.characteristic_poly()
    r = outcome.order
    shifts = verify_recurrence(seq, outcome)
    if not p[0]:
        # no set of nonzero atoms reproduces the prefix
        return _failed(
            RankKind.MOMENT,
            RankStatus.NO_FINITE_RANK,
            seq,
            rank=None,
            char_poly=p,
            verified_shifts=shifts,
            detail=f"characteristic polynomial {p} vanishes at 0",
        )
    if not is_squarefree(p):
        return _failed(
            RankKind.MOMENT,
            RankStatus.ERROR_NOT_SIMPLE,
            seq,
            char_poly=p,
            verified_shifts=shifts,
            detail=f"characteristic polynomial {p} has a repeated root",
        )

    atoms, exact = _characteristic_roots(p, tol)
    basis = ModifiedVandermonde(tuple(atoms))
    masses = basis.solve_masses(seq.terms[:r])
    if exact:
        rebuilt = basis.exact_matrix(cols=n_terms).transpose() @ masses
        if rebuilt != seq.terms:
            raise PathDisagreement(f"Exact moments of the recovered measure differ from the input for {p}")
        residual = 0.0
    else:
        rebuilt = basis.numeric_matrix(cols=n_terms).T @ np.array(masses, dtype=complex)
        target = seq.to_numpy()
        residual = float(np.max(np.abs(rebuilt - target) / np.maximum(1.0, np.abs(target))))
        if residual > config("RESIDUAL_TOL"):
            logger.error(f"[moment] numeric reconstruction residual {residual:.3e} for {p}")
            raise RootFindingFailed(f"Reconstruction residual {residual:.3e} exceeds RESIDUAL_TOL for {p}")
        logger.warning(f"[moment] irrational atoms for {p}; numeric path, residual {residual:.3e}")
    if any(not m for m in masses):
        logger.warning(f"[moment] a recovered mass vanishes for {p}")

    logger.info(f"[moment] rank {r} certified on {shifts} shifts ({'exact' if exact else 'numeric'} atoms)")
    return RankCertificate(
        kind=RankKind.MOMENT,
        status=RankStatus.CERTIFIED,
        rank=r,
        char_poly=p,
        atoms=tuple(atoms),
        masses=tuple(masses),
        verified_shifts=shifts,
        exact=exact,
        residual=residual,
        start_index=0,
        term_count=n_terms,
    )


def integer_masses(cert: RankCertificate) -> list | None:
    """
    Masses of a certified moment-rank certificate as positive integers, or None.

    Numeric masses are accepted when both |Im| and the distance of Re to the
    nearest integer stay below MASS_INTEGER_TOL.
    """
    tol = config("MASS_INTEGER_TOL")
    out = []
    for m in cert.masses:
        if isinstance(m, GaussianRational):
            if not m.is_integer:
                return None
            value = int(m.re)
        else:
            w = complex(m)
            value = round(w.real)
            if abs(w.imag) >= tol or abs(w.real - value) >= tol:
                return None
        if value <= 0:
            return None
        out.append(value)
    return out


def _multiset_atoms(char_poly: ExactPoly, tol: float | None):
    """Distinct roots of char_poly with multiplicities, via Yun's decomposition."""
    atoms, masses, exact = [], [], True
    for factor, multiplicity in squarefree_decomposition(char_poly):
        roots, factor_exact = _characteristic_roots(factor, tol)
        exact = exact and factor_exact
        atoms.extend(roots)
        masses.extend([GaussianRational(multiplicity)] * len(roots))
    order = sorted(range(len(atoms)), key=lambda k: atom_sort_key(atoms[k]))
    return tuple(atoms[k] for k in order), tuple(masses[k] for k in order), exact


def urank(seq: SequenceWindow, tol: float | None = None) -> RankCertificate:
    """
    Unitary rank of power sums c_1, ..., c_N: size of the smallest multiset of
    nonzero atoms with c_n = sum(beta_i ** n).

    The exact Newton path is authoritative whenever it certifies; the shifted
    moment-rank path must then agree. When the Newton path has no headroom left,
    a shifted certificate with positive integer masses certifies on its own, and
    non-integer masses give NonIntegerMasses.

    Args:
        seq: Prefix indexed from 1 with at least two terms.
        tol: Root-finding tolerance (defaults to SEQRANK_TOL).

    Raises:
        IndexConventionError: If the window does not start at index 1.
        PrefixTooShort: If fewer than two terms are supplied.
        PathDisagreement: If the two paths contradict each other exactly.
    """
    if seq.start_index != 1:
        raise IndexConventionError(f"Unitary rank expects index origin 1, window starts at {seq.start_index}")
    n_terms = len(seq)
    if n_terms < 2:
        raise PrefixTooShort(2, n_terms)
    if seq.is_zero:
        return _zero_certificate(RankKind.UNITARY, seq)

    newton = power_sums_to_newton(seq)
    r = newton.candidate_rank()
    newton_ok = r < n_terms and newton_tail_check(newton, seq, r)

    cross = None
    if n_terms >= MIN_TERMS:
        try:
            cross = mrank(seq.shift(), tol)
        except SeqRankError as e:
            logger.warning(f"[unitary] shifted path failed: {e}")
    cross_ints = integer_masses(cross) if cross is not None and cross.certified else None

    if newton_ok:
        char_poly = newton.characteristic_poly(r)
        if cross is not None and cross.certified:
            if cross_ints is None:
                if cross.exact:
                    raise PathDisagreement(
                        f"Newton path certifies rank {r} but shifted masses {[str(m) for m in cross.masses]} are not integers"
                    )
                logger.warning(f"[unitary] numeric shifted masses not near integers; Newton rank {r} stands")
            elif sum(cross_ints) != r:
                raise PathDisagreement(f"Newton rank {r} but shifted masses sum to {sum(cross_ints)}")
        elif cross is not None:
            logger.info(f"[unitary] shifted path inconclusive ({cross.status.value}); Newton rank {r} stands")
        atoms, masses, exact = _multiset_atoms(char_poly, tol)
        logger.info(f"[unitary] rank {r} certified by Newton identities with {n_terms - r} tail terms")
        return RankCertificate(
            kind=RankKind.UNITARY,
            status=RankStatus.CERTIFIED,
            rank=r,
            char_poly=char_poly,
            atoms=atoms,
            masses=masses,
            verified_shifts=n_terms - r,
            exact=exact,
            start_index=1,
            term_count=n_terms,
        )

    if cross is not None and cross.certified:
        if cross_ints is None:
            return _failed(
                RankKind.UNITARY,
                RankStatus.NON_INTEGER_MASSES,
                seq,
                char_poly=cross.char_poly,
                atoms=cross.atoms,
                masses=cross.masses,
                verified_shifts=cross.verified_shifts,
                exact=cross.exact,
                residual=cross.residual,
                detail="shifted moment-rank masses are not positive integers",
            )
        total = sum(cross_ints)
        if total < n_terms:
            message = f"shifted path gives integer masses summing to {total} but Newton identities do not close"
            if cross.exact:
                raise PathDisagreement(message)
            # the masses only look integral within MASS_INTEGER_TOL
            logger.warning(f"[unitary] {message}; the numeric masses are not integers")
            return _failed(
                RankKind.UNITARY,
                RankStatus.NON_INTEGER_MASSES,
                seq,
                char_poly=cross.char_poly,
                atoms=cross.atoms,
                masses=cross.masses,
                verified_shifts=cross.verified_shifts,
                exact=False,
                residual=cross.residual,
                detail=f"{message}: numeric masses are near integers but not integers",
            )
        else:
            if cross.exact:
                char_poly = ExactPoly.from_roots(a for a, m in zip(cross.atoms, cross_ints) for _ in range(m))
            else:
                char_poly = cross.char_poly
            logger.info(f"[unitary] rank {total} certified by the shifted path only")
            return RankCertificate(
                kind=RankKind.UNITARY,
                status=RankStatus.CERTIFIED,
                rank=total,
                char_poly=char_poly,
                atoms=cross.atoms,
                masses=tuple(GaussianRational(m) for m in cross_ints),
                verified_shifts=cross.verified_shifts,
                exact=cross.exact,
                residual=cross.residual,
                start_index=1,
                term_count=n_terms,
                detail="Newton path lacks headroom; certified by the shifted moment-rank path",
            )

    cross_note = "shifted path not run" if cross is None else f"shifted path {cross.status.value}"
    return _failed(
        RankKind.UNITARY,
        RankStatus.NO_FINITE_RANK,
        seq,
        detail=f"Newton candidate degree {r} leaves no tail within {n_terms} terms; {cross_note}",
    )


def expected_nullity(rank: int, m: int) -> int:
    """Closed form nul H_{m,t} = max(0, m - r + 1) for a sequence of moment rank r."""
    return max(0, m - rank + 1)


def nullity_profile(seq: SequenceWindow, m_max: int, t: int | None = None) -> list:
    """
    Exact nullities of H_{m,t} for m = 0..m_max.

    Args:
        seq: Moment-rank prefix (index origin 0) whose mrank certifies.
        m_max: Largest window parameter.
        t: Absolute shift of the windows (defaults to the origin).

    Raises:
        RankFailure: If mrank does not certify.
        PrefixTooShort: If H_{m_max,t} needs more terms than available.
        NullityMismatch: If any nullity differs from expected_nullity.
    """
    rank = mrank(seq).raise_for_status().rank
    profile = [len(kernel_basis(hankel_window(seq, m, t))) for m in range(m_max + 1)]
    for m, nullity in enumerate(profile):
        expected = expected_nullity(rank, m)
        if nullity != expected:
            logger.error(f"nul H_{m} = {nullity}, closed form gives {expected} for rank {rank}")
            raise NullityMismatch(rank, m, expected, nullity, profile)
    return profile


# --- equivalent characterisations ---------------------------------------------


class Verdict(str, Enum):
    RANK = "rank"
    NOT_SIMPLE = "not simple"
    NO_RANK = "no finite rank"
    ZERO_SEQUENCE = "zero sequence"
    NON_INTEGER = "non-integer masses"
    ERROR = "checker error"


_STATUS_VERDICTS = {
    RankStatus.CERTIFIED: Verdict.RANK,
    RankStatus.ERROR_NOT_SIMPLE: Verdict.NOT_SIMPLE,
    RankStatus.NO_FINITE_RANK: Verdict.NO_RANK,
    RankStatus.NON_INTEGER_MASSES: Verdict.NON_INTEGER,
}


@dataclass(frozen=True)
class ConditionResult:
    """One characterisation evaluated on one prefix."""

    group: str
    condition: str
    verdict: Verdict
    rank: int | None = None
    detail: str = ""
    conclusive: bool = True

    @property
    def classification(self) -> tuple:
        return (self.verdict, self.rank)

    def describe(self) -> str:
        if self.verdict is Verdict.RANK:
            return f"rank {self.rank}"
        if self.verdict is Verdict.ZERO_SEQUENCE:
            return "rank 0 (zero sequence)"
        return self.verdict.value


@dataclass(frozen=True)
class TfaeReport:
    results: tuple
    disagreement: tuple | None = None

    @property
    def agree(self) -> bool:
        return self.disagreement is None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "group": r.group,
                    "condition": r.condition,
                    "verdict": r.verdict.value,
                    "rank": r.rank,
                    "conclusive": r.conclusive,
                    "detail": r.detail,
                }
                for r in self.results
            ]
        )

    def format(self) -> str:
        lines = [f"[{r.group}] {r.condition:<40} {r.describe()}" for r in self.results]
        if self.agree:
            lines.append("all conditions agree")
        else:
            expected, found = self.disagreement
            lines += [
                f"--- [{expected.group}] {expected.condition}",
                f"+++ [{found.group}] {found.condition}",
                f"- {expected.describe()}  {expected.detail}".rstrip(),
                f"+ {found.describe()}  {found.detail}".rstrip(),
            ]
        return "\n".join(lines)


def _from_certificate(group: str, condition: str, cert: RankCertificate) -> ConditionResult:
    if cert.zero_sequence:
        return ConditionResult(group, condition, Verdict.ZERO_SEQUENCE, 0, cert.detail)
    return ConditionResult(
        group,
        condition,
        _STATUS_VERDICTS[cert.status],
        cert.rank if cert.certified else None,
        cert.detail,
        conclusive=cert.status is not RankStatus.NO_FINITE_RANK,
    )


def _check_recurrence(seq: SequenceWindow) -> ConditionResult:
    name = "minimal simple recurrence"
    outcome = minimal_recurrence(seq)
    if outcome is RecurrenceOutcome.ZERO_SEQUENCE:
        return ConditionResult("moment", name, Verdict.ZERO_SEQUENCE, 0)
    if outcome is RecurrenceOutcome.NONE_FOUND:
        return ConditionResult("moment", name, Verdict.NO_RANK, detail="prefix exhausted")
    p = outcome.characteristic_poly()
    if not p[0]:
        return ConditionResult("moment", name, Verdict.NO_RANK, detail=f"{p} vanishes at 0")
    if not is_squarefree(p):
        return ConditionResult("moment", name, Verdict.NOT_SIMPLE, detail=f"{p} has a repeated root")
    return ConditionResult("moment", name, Verdict.RANK, outcome.order, str(p))


def _check_hankel(seq: SequenceWindow) -> ConditionResult:
    name = "Hankel determinant/kernel"
    if seq.is_zero:
        return ConditionResult("moment", name, Verdict.ZERO_SEQUENCE, 0)
    n_terms = len(seq)
    for r in range(1, (n_terms - 1) // 2 + 1):
        if not exact_det(hankel_window(seq, r - 1)):
            continue
        kernel = kernel_basis(hankel_window(seq, r))
        if len(kernel) != 1:
            continue
        v = kernel[0]
        last_shift = n_terms - 1 - 2 * r
        if any(any(hankel_window(seq, r, t) @ v) for t in range(1, last_shift + 1)):
            continue
        poly = ExactPoly(v)
        if not poly[0]:
            return ConditionResult("moment", name, Verdict.NO_RANK, detail=f"kernel polynomial {poly} vanishes at 0")
        if poly.degree >= 2 and not discriminant(poly):
            return ConditionResult("moment", name, Verdict.NOT_SIMPLE, detail=f"kernel polynomial {poly} has discriminant 0")
        for t in range(last_shift + 1):
            if not exact_det(hankel_window(seq, r - 1, t)) or len(kernel_basis(hankel_window(seq, r, t))) != 1:
                return ConditionResult("moment", name, Verdict.NO_RANK, detail=f"window condition fails at t={t}")
        return ConditionResult("moment", name, Verdict.RANK, r, f"kernel spanned by {poly}")
    return ConditionResult("moment", name, Verdict.NO_RANK, detail="prefix exhausted")


def _check_genfun(seq: SequenceWindow) -> ConditionResult:
    from analytic import genfun

    name = "rational generating function"
    if seq.is_zero:
        return ConditionResult("moment", name, Verdict.ZERO_SEQUENCE, 0)
    try:
        gf = genfun(seq)
    except RankFailure as e:
        return ConditionResult("moment", name, Verdict.NO_RANK, detail=str(e))
    poles = gf.denominator.degree
    if poles < gf.order:
        return ConditionResult("moment", name, Verdict.NO_RANK, detail=f"{poles} poles for order {gf.order}")
    if not gf.simple:
        return ConditionResult("moment", name, Verdict.NOT_SIMPLE, detail=gf.format())
    return ConditionResult("moment", name, Verdict.RANK, poles, gf.format())


def _check_radical(seq: SequenceWindow) -> ConditionResult:
    name = "radical recurrence ideal"
    try:
        generator = ideal_generator(seq)
    except NoGeneratorWithinPrefix as e:
        return ConditionResult("moment", name, Verdict.NO_RANK, detail=str(e))
    if generator.degree == 0:
        return ConditionResult("moment", name, Verdict.ZERO_SEQUENCE, 0)
    if not generator[0]:
        return ConditionResult("moment", name, Verdict.NO_RANK, detail=f"generator {generator} vanishes at 0")
    if not is_radical(seq):
        return ConditionResult("moment", name, Verdict.NOT_SIMPLE, detail=f"generator {generator} is not squarefree")
    return ConditionResult("moment", name, Verdict.RANK, generator.degree, str(generator))


def _check_algorithm(seq: SequenceWindow) -> ConditionResult:
    return _from_certificate("moment", "moment-rank algorithm", mrank(seq))


def _check_vandermonde(seq: SequenceWindow) -> ConditionResult:
    from analytic import vandermonde_factor

    name = "Vandermonde decomposition"
    cert = mrank(seq)
    if not cert.certified or cert.zero_sequence:
        return _from_certificate("moment", name, cert)
    window_rank = column_rank(hankel_window(seq, (len(seq) - 1) // 2))
    factor = vandermonde_factor(seq, cert.rank)
    if factor.residual > config("RESIDUAL_TOL"):
        return ConditionResult("moment", name, Verdict.NO_RANK, detail=f"residual {factor.residual:.3e}")
    return ConditionResult("moment", name, Verdict.RANK, window_rank, f"largest window rank {window_rank}")


def _reproduces(mu, seq: SequenceWindow, convention) -> bool:
    """Forward moments of mu equal seq, exactly or within RESIDUAL_TOL (relative)."""
    from analytic import moments, numeric_moments

    if mu.is_exact:
        return moments(mu, len(seq), convention) == seq
    target = seq.to_numpy()
    error = np.abs(numeric_moments(mu, len(seq), convention) - target) / np.maximum(1.0, np.abs(target))
    return bool(np.max(error) <= config("RESIDUAL_TOL"))


def _check_measure(seq: SequenceWindow) -> ConditionResult:
    from analytic import Convention, recover_measure

    name = "atomic measure"
    try:
        mu = recover_measure(seq)
    except RankFailure as e:
        return _from_certificate("moment", name, e.certificate)
    if not mu.support:
        return ConditionResult("moment", name, Verdict.ZERO_SEQUENCE, 0)
    if not _reproduces(mu, seq, Convention.MOMENT_RANK):
        return ConditionResult("moment", name, Verdict.NO_RANK, detail="forward moments differ from the input")
    return ConditionResult("moment", name, Verdict.RANK, len(mu.support), f"{len(mu.support)} atoms")


def _check_waring(seq: SequenceWindow) -> ConditionResult:
    from analytic import recover_measure, waring_build, waring_verify

    name = "Waring decomposition"
    try:
        mu = recover_measure(seq)
    except RankFailure as e:
        return _from_certificate("moment", name, e.certificate)
    r = len(mu.support)
    if r == 0:
        return ConditionResult("moment", name, Verdict.ZERO_SEQUENCE, 0)
    shifts = [t for t in (0, 1, 2) if t + 2 * r <= len(seq) - 1]
    failed = [t for t in shifts if not waring_verify(waring_build(seq, r, t), mu)]
    if failed:
        return ConditionResult("moment", name, Verdict.NO_RANK, detail=f"identity fails at t={failed}")
    return ConditionResult("moment", name, Verdict.RANK, r, f"verified at t={shifts}")


def _check_unitary_oracle(seq: SequenceWindow) -> ConditionResult:
    from analytic import AtomicMeasure, Convention

    name = "multiset forward oracle"
    cert = urank(seq)
    if cert.zero_sequence or not cert.certified:
        return _from_certificate("unitary", name, cert)
    mu = AtomicMeasure(cert.atoms, cert.masses)
    if not _reproduces(mu, seq, Convention.UNITARY_RANK):
        return ConditionResult("unitary", name, Verdict.NO_RANK, detail="power sums of the multiset differ")
    return ConditionResult("unitary", name, Verdict.RANK, cert.rank, f"{len(cert.atoms)} distinct atoms")


def _check_unitary_shifted(seq: SequenceWindow) -> ConditionResult:
    name = "shifted algorithm, integer masses"
    if len(seq) < MIN_TERMS:
        return ConditionResult("unitary", name, Verdict.NO_RANK, detail="prefix too short", conclusive=False)
    cert = mrank(seq.shift())
    if cert.zero_sequence or not cert.certified:
        return _from_certificate("unitary", name, cert)
    masses = integer_masses(cert)
    if masses is None:
        return ConditionResult("unitary", name, Verdict.NON_INTEGER, detail=str([str(m) for m in cert.masses]))
    return ConditionResult("unitary", name, Verdict.RANK, sum(masses), f"masses {masses}")


def _check_unitary_newton(seq: SequenceWindow) -> ConditionResult:
    name = "Newton polynomial"
    if seq.is_zero:
        return ConditionResult("unitary", name, Verdict.ZERO_SEQUENCE, 0)
    newton = power_sums_to_newton(seq)
    r = newton.candidate_rank()
    if r < len(seq) and newton_tail_check(newton, seq, r):
        return ConditionResult("unitary", name, Verdict.RANK, r, str(newton.reciprocal_poly()))
    return ConditionResult("unitary", name, Verdict.NO_RANK, detail=f"e_{r} != 0 leaves no tail", conclusive=False)


def _check_unitary_gramian(seq: SequenceWindow) -> ConditionResult:
    from analytic import gramian_factor

    name = "augmented Gramian window"
    cert = urank(seq)
    if cert.zero_sequence or not cert.certified:
        return _from_certificate("unitary", name, cert)
    if not seq.is_real:
        return ConditionResult("unitary", name, Verdict.NO_RANK, detail="non-real power sums", conclusive=False)
    r = cert.rank
    # H'_{r-1,t} reads c'_t .. c'_{t+2r-2} of the augmented prefix c'_0..c'_N
    shifts = [t for t in (0, 1, 2) if t + 2 * r - 2 <= len(seq)]
    if not shifts:
        return ConditionResult("unitary", name, Verdict.NO_RANK, detail="prefix too short", conclusive=False)
    tol = 0.0 if cert.exact else config("RESIDUAL_TOL")
    failed = [t for t in shifts if gramian_factor(seq, t=t).residual > tol]
    if failed:
        return ConditionResult("unitary", name, Verdict.NO_RANK, detail=f"V^T diag(beta^t) V differs at t={failed}")
    return ConditionResult("unitary", name, Verdict.RANK, r, f"rebuilt at t={shifts}")


def _check_unitary_waring(seq: SequenceWindow) -> ConditionResult:
    from analytic import AtomicMeasure, Convention, waring_build, waring_verify

    name = "Waring decomposition, integer masses"
    cert = urank(seq)
    if cert.zero_sequence or not cert.certified:
        return _from_certificate("unitary", name, cert)
    mu = AtomicMeasure(cert.atoms, cert.masses)
    r_prime = len(mu.support)
    last = seq.start_index + len(seq) - 1
    shifts = [t for t in (1, 2, 3) if t + 2 * r_prime <= last]
    if not shifts:
        return ConditionResult("unitary", name, Verdict.NO_RANK, detail="prefix too short", conclusive=False)
    failed = [t for t in shifts if not waring_verify(waring_build(seq, r_prime, t), mu, Convention.UNITARY_RANK)]
    if failed:
        return ConditionResult("unitary", name, Verdict.NO_RANK, detail=f"identity fails at t={failed}")
    return ConditionResult("unitary", name, Verdict.RANK, cert.rank, f"verified at t={shifts}")


def _check_unitary_measure(seq: SequenceWindow) -> ConditionResult:
    from analytic import AtomicMeasure, Convention

    name = "integer-mass measure"
    if len(seq) < MIN_TERMS:
        return ConditionResult("unitary", name, Verdict.NO_RANK, detail="prefix too short", conclusive=False)
    cert = mrank(seq.shift())
    if cert.zero_sequence or not cert.certified:
        return _from_certificate("unitary", name, cert)
    masses = integer_masses(cert)
    if masses is None:
        return ConditionResult("unitary", name, Verdict.NON_INTEGER, detail=str([str(m) for m in cert.masses]))
    mu = AtomicMeasure(cert.atoms, tuple(GaussianRational(m) for m in masses))
    if not _reproduces(mu, seq, Convention.UNITARY_RANK):
        return ConditionResult("unitary", name, Verdict.NO_RANK, detail=f"integer masses {masses} do not reproduce the input")
    return ConditionResult("unitary", name, Verdict.RANK, sum(masses), f"masses {masses}")


MOMENT_CHECKS = (
    _check_recurrence,
    _check_hankel,
    _check_genfun,
    _check_radical,
    _check_algorithm,
    _check_vandermonde,
    _check_measure,
    _check_waring,
)
UNITARY_CHECKS = (
    _check_unitary_oracle,
    _check_unitary_shifted,
    _check_unitary_newton,
    _check_unitary_gramian,
    _check_unitary_waring,
    _check_unitary_measure,
)


def _run_check(check, seq: SequenceWindow) -> ConditionResult:
    try:
        return check(seq)
    except SeqRankError as e:
        logger.error(f"{check.__name__} raised {type(e).__name__}: {e}")
        return ConditionResult("unitary" if check in UNITARY_CHECKS else "moment", check.__name__, Verdict.ERROR, detail=str(e))


def _unitary_key(result: ConditionResult) -> tuple:
    # NON_INTEGER, NOT_SIMPLE and a conclusive NO_RANK all mean "no finite unitary rank"
    if result.verdict in (Verdict.NON_INTEGER, Verdict.NOT_SIMPLE):
        return (Verdict.NO_RANK, None)
    return result.classification


def _first_disagreement(results: list) -> tuple | None:
    moment = [r for r in results if r.group == "moment"]
    for other in moment[1:]:
        if other.classification != moment[0].classification:
            return (moment[0], other)
    unitary = [r for r in results if r.group == "unitary" and (r.conclusive or r.verdict is Verdict.ERROR)]
    for other in unitary[1:]:
        if _unitary_key(other) != _unitary_key(unitary[0]):
            return (unitary[0], other)
    return None


def tfae_crosscheck(seq: SequenceWindow, parallel: bool | None = None) -> TfaeReport:
    """
    Evaluate every independently computable rank characterisation and compare.

    Moment-rank conditions run on the prefix as an index-0 sequence (a power-sum
    window is read as its shift). For windows indexed from 1 the unitary
    conditions run as well. Moment conditions must agree exactly; unitary
    conditions are compared where conclusive, since the Newton and shifted paths
    need different amounts of headroom.

    Args:
        seq: Exact prefix.
        parallel: Evaluate the checkers on a thread pool (defaults to TFAE_PARALLEL).

    Returns:
        TfaeReport: Per-condition verdicts and the first disagreement, if any.
    """
    if parallel is None:
        parallel = config("TFAE_PARALLEL")
    moment_seq = seq if seq.start_index == 0 else SequenceWindow(0, seq.terms)
    jobs = [(check, moment_seq) for check in MOMENT_CHECKS]
    if seq.start_index == 1:
        jobs += [(check, seq) for check in UNITARY_CHECKS]

    if parallel:
        with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
            results = list(pool.map(lambda job: _run_check(*job), jobs))
    else:
        results = [_run_check(check, s) for check, s in jobs]

    disagreement = _first_disagreement(results)
    if disagreement is None:
        logger.info(f"All {len(results)} conditions agree: {results[0].describe()}")
    else:
        logger.error(f"Conditions disagree: {disagreement[0].condition} vs {disagreement[1].condition}")
    return TfaeReport(tuple(results), disagreement)

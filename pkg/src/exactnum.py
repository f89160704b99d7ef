"""
exactnum.py
-----------
Exact scalar and polynomial arithmetic over the Gaussian rationals Q(i).

Provides:
1. GaussianRational: a + b*i backed by an element of sympy's QQ_I domain; the
   scalar behind every certified rank decision (equality is decidable, nothing
   is ever rounded).
2. ExactPoly: univariate polynomials over GaussianRational, coefficients stored
   lowest degree first, the zero polynomial being the empty tuple. Ring
   operations run on sympy ``Poly`` objects over QQ_I.
3. The distinct-roots machinery, delegated to sympy: gcd, resultants,
   discriminants, squarefree tests and decompositions, and factorisation into
   irreducibles over Q(i).

Scalar literal grammar (used by the CLI file parsers and by str()):

    a      a/b      a+ci      a/b+c/di      ci      i      -i

with an optional sign on each part; whitespace is ignored.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import numpy as np
from sympy import QQ, QQ_I, Poly, Symbol
from sympy.polys.domains.gaussiandomains import GaussianElement

logger = logging.getLogger(__name__)

# generator of every sympy Poly built here
X = Symbol("x")


class SeqRankError(ValueError):
    """Root of every error raised by the seqrank modules."""


class DegenerateInput(SeqRankError):
    """Raised when an operation receives the zero polynomial or an unusable degree."""


class InvalidLiteral(SeqRankError):
    """Raised when text does not follow the scalar literal grammar."""


_NUM = r"\d+(?:/\d+)?"
_REAL_RE = re.compile(rf"^[+-]?{_NUM}$")
_IMAG_RE = re.compile(rf"^(?P<im>[+-]?(?:{_NUM})?)i$")
_COMPLEX_RE = re.compile(rf"^(?P<re>[+-]?{_NUM})(?P<im>[+-](?:{_NUM})?)i$")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ZeroDivisionError as e:
        raise InvalidLiteral(f"Zero denominator in literal '{text}'") from e


def _imag_coefficient(text: str) -> Fraction:
    # a bare sign in front of i means unit magnitude
    if text in ("", "+"):
        return Fraction(1)
    if text == "-":
        return Fraction(-1)
    return _fraction(text)


def _to_qq(value: Fraction):
    return QQ(value.numerator, value.denominator)


def _from_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


Coercible = Union["GaussianRational", Fraction, int, str]


class GaussianRational:
    """
    Exact complex number re + im*i with rational parts.

    The value lives in sympy's QQ_I field; `re` and `im` are read back as
    Fractions. Instances are immutable and hash like ints and Fractions on the
    real axis.
    """

    __slots__ = ("value",)

    def __init__(self, re: Fraction | int | str = 0, im: Fraction | int | str = 0):
        for name, part in (("re", re), ("im", im)):
            if isinstance(part, (float, complex)):
                raise TypeError(f"GaussianRational.{name} must be exact, got {part!r}")
        object.__setattr__(self, "value", QQ_I(_to_qq(Fraction(re)), _to_qq(Fraction(im))))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (self.re, self.im))

    # --- construction -------------------------------------------------------

    @classmethod
    def from_domain(cls, element) -> "GaussianRational":
        """Wrap an element of QQ_I (or anything QQ_I converts, such as ZZ_I)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "value", QQ_I.convert(element))
        return obj

    @classmethod
    def from_sympy(cls, expr) -> "GaussianRational":
        """Convert a sympy number of the form p/q + (r/s)*I."""
        return cls.from_domain(QQ_I.from_sympy(expr))

    @classmethod
    def coerce(cls, value: Coercible) -> "GaussianRational":
        """Lift ints, Fractions, QQ_I elements and literal strings into Q(i)."""
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, (int, Fraction)):
            return cls(Fraction(value))
        if isinstance(value, GaussianElement):
            return cls.from_domain(value)
        raise TypeError(f"Cannot build an exact scalar from {type(value).__name__}: {value!r}")

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """
        Parse a scalar literal.

        Args:
            text: e.g. "3", "-1/2", "2+3i", "1/2-3/4i", "5i", "-i".

        Returns:
            GaussianRational: The parsed value.

        Raises:
            InvalidLiteral: If the text is not in the literal grammar.
        """
        compact = "".join(text.split())
        if _REAL_RE.match(compact):
            return cls(_fraction(compact))
        match = _IMAG_RE.match(compact)
        if match:
            return cls(Fraction(0), _imag_coefficient(match["im"]))
        match = _COMPLEX_RE.match(compact)
        if match:
            return cls(_fraction(match["re"]), _imag_coefficient(match["im"]))
        raise InvalidLiteral(f"Not a Gaussian-rational literal: '{text}'")

    # --- predicates and conversions ----------------------------------------

    @property
    def re(self) -> Fraction:
        return _from_qq(self.value.x)

    @property
    def im(self) -> Fraction:
        return _from_qq(self.value.y)

    @property
    def is_real(self) -> bool:
        return not self.value.y

    @property
    def is_integer(self) -> bool:
        return not self.value.y and self.re.denominator == 1

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus re^2 + im^2 (exact)."""
        return self.re * self.re + self.im * self.im

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def to_sympy(self):
        return QQ_I.to_sympy(self.value)

    def __complex__(self) -> complex:
        return self.to_complex()

    def __bool__(self) -> bool:
        return bool(self.value)

    # --- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational.from_domain(self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational.from_domain(self.value - other.value)

    def __rsub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return GaussianRational.from_domain(self.value * other.value)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if not other:
            raise ZeroDivisionError("Division by the zero Gaussian rational")
        return GaussianRational.from_domain(self.value / other.value)

    def __rtruediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other / self

    def __neg__(self):
        return GaussianRational.from_domain(-self.value)

    def __pos__(self):
        return self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0 and not self:
            raise ZeroDivisionError("Negative power of the zero Gaussian rational")
        return GaussianRational.from_domain(self.value**exponent)

    # --- equality, hashing, display ----------------------------------------

    def __eq__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self.value == other.value

    def __hash__(self):
        # agree with hash(int) / hash(Fraction) on the real axis
        if self.is_real:
            return hash(self.re)
        return hash((self.re, self.im))

    def __str__(self) -> str:
        re_part, im_part = self.re, self.im
        if im_part == 0:
            return str(re_part)
        unit = "i" if abs(im_part) == 1 else f"{abs(im_part)}i"
        if re_part == 0:
            return f"-{unit}" if im_part < 0 else unit
        return f"{re_part}{'-' if im_part < 0 else '+'}{unit}"

    def __repr__(self) -> str:
        return f"GaussianRational('{self}')"


def _lift(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(Fraction(value))
    return NotImplemented


ZERO = GaussianRational(0)
ONE = GaussianRational(1)


@dataclass(frozen=True, repr=False)
class ExactPoly:
    """
    Polynomial sum(coeffs[k] * x**k) over Q(i).

    Trailing zero coefficients are stripped on construction so the leading
    coefficient is nonzero; the zero polynomial is the empty tuple and has no degree.
    Products, division and derivatives are computed on the equivalent sympy
    ``Poly`` over QQ_I (see `to_poly` / `from_poly`).
    """

    coeffs: tuple = ()

    def __post_init__(self):
        terms = [GaussianRational.coerce(c) for c in self.coeffs]
        while terms and not terms[-1]:
            terms.pop()
        object.__setattr__(self, "coeffs", tuple(terms))

    @classmethod
    def constant(cls, value: Coercible) -> "ExactPoly":
        return cls((value,))

    @classmethod
    def monomial(cls, k: int, value: Coercible = 1) -> "ExactPoly":
        return cls((0,) * k + (value,))

    @classmethod
    def from_roots(cls, roots: Iterable[Coercible]) -> "ExactPoly":
        """Monic product of (x - root) over the given roots (with repetition)."""
        poly = Poly.from_list([QQ_I.one], X, domain=QQ_I)
        for root in roots:
            poly = poly * Poly.from_list([QQ_I.one, -GaussianRational.coerce(root).value], X, domain=QQ_I)
        return cls.from_poly(poly)

    # --- sympy bridge -------------------------------------------------------------

    def to_poly(self) -> Poly:
        """The same polynomial as a sympy Poly in `X` over QQ_I."""
        return Poly.from_list([c.value for c in reversed(self.coeffs)], X, domain=QQ_I)

    @classmethod
    def from_poly(cls, poly: Poly) -> "ExactPoly":
        """Read a univariate sympy Poly with Gaussian-rational coefficients."""
        if poly.domain == QQ_I:
            return cls(tuple(GaussianRational.from_domain(c) for c in reversed(poly.rep.to_list())))
        return cls(tuple(GaussianRational.from_sympy(c) for c in reversed(poly.all_coeffs())))

    # --- structure ------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_real(self) -> bool:
        return all(c.is_real for c in self.coeffs)

    @property
    def degree(self) -> int:
        if not self.coeffs:
            raise DegenerateInput("The zero polynomial has no degree")
        return len(self.coeffs) - 1

    @property
    def leading(self) -> GaussianRational:
        if not self.coeffs:
            raise DegenerateInput("The zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, k: int) -> GaussianRational:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return ZERO

    def __call__(self, z: Coercible) -> GaussianRational:
        return eval_poly(self, GaussianRational.coerce(z))

    # --- ring operations --------------------------------------------------------

    def __add__(self, other: "ExactPoly") -> "ExactPoly":
        size = max(len(self.coeffs), len(other.coeffs))
        return ExactPoly(tuple(self[k] + other[k] for k in range(size)))

    def __sub__(self, other: "ExactPoly") -> "ExactPoly":
        size = max(len(self.coeffs), len(other.coeffs))
        return ExactPoly(tuple(self[k] - other[k] for k in range(size)))

    def __neg__(self) -> "ExactPoly":
        return ExactPoly(tuple(-c for c in self.coeffs))

    def __mul__(self, other) -> "ExactPoly":
        if not isinstance(other, ExactPoly):
            return self.scale(other)
        if self.is_zero or other.is_zero:
            return ExactPoly()
        return ExactPoly.from_poly(self.to_poly() * other.to_poly())

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "ExactPoly":
        if exponent == 0:
            return ExactPoly.constant(1)
        return ExactPoly.from_poly(self.to_poly() ** exponent)

    def scale(self, factor: Coercible) -> "ExactPoly":
        factor = GaussianRational.coerce(factor)
        return ExactPoly(tuple(c * factor for c in self.coeffs))

    def __divmod__(self, divisor: "ExactPoly"):
        if divisor.is_zero:
            raise ZeroDivisionError("Polynomial division by zero")
        quotient, remainder = self.to_poly().div(divisor.to_poly())
        return ExactPoly.from_poly(quotient), ExactPoly.from_poly(remainder)

    def __floordiv__(self, divisor: "ExactPoly") -> "ExactPoly":
        return divmod(self, divisor)[0]

    def __mod__(self, divisor: "ExactPoly") -> "ExactPoly":
        return divmod(self, divisor)[1]

    def derivative(self) -> "ExactPoly":
        if self.is_zero:
            return ExactPoly()
        return ExactPoly.from_poly(self.to_poly().diff(X))

    def monic(self) -> "ExactPoly":
        return self.scale(ONE / self.leading)

    def reciprocal(self) -> "ExactPoly":
        """Coefficients reversed: x**n * p(1/x) for n = degree."""
        return ExactPoly(tuple(reversed(self.coeffs)))

    def to_numpy(self) -> np.ndarray:
        """Complex coefficient vector, lowest degree first."""
        return np.array([c.to_complex() for c in self.coeffs], dtype=complex)

    # --- display ----------------------------------------------------------------

    def format(self, var: str = "x", ascending: bool = False) -> str:
        """
        Human-readable form, e.g. ``x^2 - 4x + 4`` or (ascending, var="z") ``1 - z - z^2``.
        Non-integer coefficients are parenthesised so ``(1/2)z`` never reads as ``1/(2z)``.
        """
        if self.is_zero:
            return "0"
        order = range(len(self.coeffs)) if ascending else range(len(self.coeffs) - 1, -1, -1)
        pieces = []
        for k in order:
            c = self.coeffs[k]
            if not c:
                continue
            negative = c.is_real and c.re < 0
            if negative:
                c = -c
            mono = "" if k == 0 else var if k == 1 else f"{var}^{k}"
            if k == 0:
                body = str(c)
            elif c == 1:
                body = mono
            elif c.is_integer:
                body = f"{c}{mono}"
            else:
                body = f"({c}){mono}"
            if not pieces:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" {'-' if negative else '+'} {body}")
        return "".join(pieces)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"ExactPoly('{self.format()}')"


def eval_poly(p: ExactPoly, z: GaussianRational) -> GaussianRational:
    """Exact Horner evaluation of p at z."""
    acc = QQ_I.zero
    for c in reversed(p.coeffs):
        acc = acc * z.value + c.value
    return GaussianRational.from_domain(acc)


def poly_gcd(p: ExactPoly, q: ExactPoly) -> ExactPoly:
    """
    Monic greatest common divisor of p and q.

    Args:
        p, q: Polynomials over Q(i); at least one must be nonzero.

    Returns:
        ExactPoly: The monic gcd (the constant 1 for coprime inputs).

    Raises:
        DegenerateInput: If both inputs are the zero polynomial.
    """
    if p.is_zero and q.is_zero:
        raise DegenerateInput("gcd(0, 0) is undefined")
    if p.is_zero:
        return q.monic()
    if q.is_zero:
        return p.monic()
    return ExactPoly.from_poly(p.to_poly().gcd(q.to_poly())).monic()


def resultant(p: ExactPoly, q: ExactPoly) -> GaussianRational:
    """Resultant res(p, q) of the Sylvester matrix; 0 if either input is zero."""
    if p.is_zero or q.is_zero:
        return ZERO
    # a constant argument has an empty Sylvester block on its side
    if p.degree == 0:
        return p.leading**q.degree
    if q.degree == 0:
        return q.leading**p.degree
    return GaussianRational.from_sympy(p.to_poly().resultant(q.to_poly()))


def discriminant(p: ExactPoly) -> GaussianRational:
    """
    Exact discriminant (-1)^(n(n-1)/2) res(p, p') / lc(p).

    Raises:
        DegenerateInput: For the zero polynomial or degree below 2.
    """
    n = p.degree
    if n < 2:
        raise DegenerateInput(f"Discriminant needs degree >= 2, got degree {n}")
    return GaussianRational.from_sympy(p.to_poly().discriminant())


def is_squarefree(p: ExactPoly) -> bool:
    """True iff gcd(p, p') is constant, i.e. p has no repeated root."""
    if p.is_zero:
        raise DegenerateInput("The zero polynomial is not squarefree")
    if p.degree == 0:
        return True
    return p.to_poly().is_sqf


def squarefree_decomposition(p: ExactPoly) -> list:
    """
    monic(p) = prod(factor ** multiplicity).

    Returns:
        list[tuple[ExactPoly, int]]: Monic, pairwise coprime, squarefree factors of
        positive degree with their multiplicities, in increasing multiplicity.
    """
    if p.degree == 0:
        return []
    _, factors = p.to_poly().sqf_list()
    pieces = [(ExactPoly.from_poly(f).monic(), k) for f, k in factors if f.degree() > 0]
    return sorted(pieces, key=lambda item: item[1])


def _gaussian_factor_list(p: ExactPoly) -> list:
    _, factors = p.to_poly().factor_list()
    return [(ExactPoly.from_poly(f).monic(), k) for f, k in factors if f.degree() > 0]


def irreducible_factors(p: ExactPoly) -> list:
    """
    Factorisation of p into monic irreducibles over Q(i).

    Real polynomials are factored over Q first. An irreducible rational factor
    splits over Q(i) into at most two pieces of equal degree, so odd-degree
    factors are kept and only even-degree ones are factored again over Q(i).

    Returns:
        list[tuple[ExactPoly, int]]: (factor, multiplicity), linear factors first.

    Raises:
        DegenerateInput: For the zero polynomial.
    """
    if p.is_zero:
        raise DegenerateInput("The zero polynomial has no factorisation")
    if p.degree == 0:
        return []
    if not p.is_real:
        factors = _gaussian_factor_list(p)
    else:
        rational = Poly.from_list([_to_qq(c.re) for c in reversed(p.coeffs)], X, domain=QQ)
        factors = []
        for f, k in rational.factor_list()[1]:
            piece = ExactPoly.from_poly(f).monic()
            if piece.degree % 2 == 0:
                factors.extend((g, k * j) for g, j in _gaussian_factor_list(piece))
            else:
                factors.append((piece, k))
    logger.debug(f"{p} has {len(factors)} distinct irreducible factor(s) over Q(i)")
    return sorted(factors, key=lambda item: item[0].degree)

"""Exact arithmetic over Q with p-adic valuations, prime fields F_p, and
square classes of Q_p^x.

Conventions used throughout the package:

* only odd primes are accepted (p = 2 is rejected at construction time);
* the valuation of zero is +infinity, represented by ``math.inf``;
* the four square classes of Q_p^x are tagged ``1, u, p, up`` where ``u`` is
  the smallest positive quadratic non-residue mod p, so tables built from
  square classes are deterministic;
* truncated p-adic units (Hensel square roots) are plain integers reduced
  mod p^N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

Rational = Union[int, Fraction]

#: valuation of zero
INFINITY = math.inf


def check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise ValueError("prime must be odd and >= 3, got %r" % (p,))
    # trial division is ample at desk scale
    d = 3
    while d * d <= p:
        if p % d == 0:
            raise ValueError("%d is not prime" % p)
        d += 2


def val_p(x: Rational, p: int):
    """p-adic valuation of a rational number; val_p(0) = +infinity."""
    check_odd_prime(p)
    x = Fraction(x)
    if x == 0:
        return INFINITY
    v = 0
    num, den = abs(x.numerator), x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


@dataclass(frozen=True)
class PadicScalar:
    """A rational number carrying its p-adic valuation.

    The fraction numerator/denominator is kept in lowest terms with a positive
    denominator; ``valuation`` is cached at construction and always matches a
    direct recomputation.
    """

    numerator: int
    denominator: int
    prime: int
    valuation: Union[int, float]

    @classmethod
    def make(cls, x: Rational, p: int) -> "PadicScalar":
        check_odd_prime(p)
        f = Fraction(x)
        return cls(f.numerator, f.denominator, p, val_p(f, p))

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            if other.prime != self.prime:
                raise ValueError("mixed primes: %d vs %d" % (self.prime, other.prime))
            return other
        return PadicScalar.make(other, self.prime)

    def __add__(self, other):
        o = self._coerce(other)
        return PadicScalar.make(self.as_fraction() + o.as_fraction(), self.prime)

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar.make(-self.as_fraction(), self.prime)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        o = self._coerce(other)
        return PadicScalar.make(self.as_fraction() * o.as_fraction(), self.prime)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.numerator == 0:
            raise ZeroDivisionError("division by zero PadicScalar")
        return PadicScalar.make(self.as_fraction() / o.as_fraction(), self.prime)

    def __bool__(self):
        return self.numerator != 0

    def is_unit(self) -> bool:
        return self.valuation == 0


@dataclass(frozen=True)
class FpScalar:
    """An element of the prime field F_p."""

    residue: int
    prime: int

    @classmethod
    def make(cls, x: Rational, p: int) -> "FpScalar":
        check_odd_prime(p)
        f = Fraction(x)
        if f.denominator % p == 0:
            raise ValueError("denominator not a unit mod %d" % p)
        inv = pow(f.denominator, -1, p)
        return cls(f.numerator * inv % p, p)

    def _coerce(self, other) -> "FpScalar":
        if isinstance(other, FpScalar):
            if other.prime != self.prime:
                raise ValueError("mixed primes")
            return other
        return FpScalar.make(other, self.prime)

    def __add__(self, other):
        o = self._coerce(other)
        return FpScalar((self.residue + o.residue) % self.prime, self.prime)

    __radd__ = __add__

    def __neg__(self):
        return FpScalar(-self.residue % self.prime, self.prime)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return FpScalar(self.residue * o.residue % self.prime, self.prime)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.residue == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.prime)
        return FpScalar(self.residue * pow(o.residue, -1, self.prime) % self.prime,
                        self.prime)

    def __bool__(self):
        return self.residue != 0


def is_residue(a: int, p: int) -> bool:
    """True iff a is a nonzero square mod p (Euler criterion)."""
    a %= p
    if a == 0:
        return False
    return pow(a, (p - 1) // 2, p) == 1


def smallest_nonresidue(p: int) -> int:
    check_odd_prime(p)
    for a in range(2, p):
        if not is_residue(a, p):
            return a
    raise AssertionError("no quadratic non-residue found mod %d" % p)


#: the four tags of Q_p^x / (Q_p^x)^2, in the fixed reporting order
SQUARE_CLASS_TAGS = ("1", "u", "p", "up")


@dataclass(frozen=True)
class SquareClassQp:
    """A square class of Q_p^x, tagged by a representative in {1, u, p, up}."""

    tag: str
    prime: int

    def __post_init__(self):
        if self.tag not in SQUARE_CLASS_TAGS:
            raise ValueError("bad square-class tag %r" % (self.tag,))

    def representative(self) -> Fraction:
        u = smallest_nonresidue(self.prime)
        return {
            "1": Fraction(1),
            "u": Fraction(u),
            "p": Fraction(self.prime),
            "up": Fraction(u * self.prime),
        }[self.tag]


def unit_part(x: Rational, p: int) -> Fraction:
    """x / p^val_p(x), a p-adic unit, for nonzero rational x."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no unit part")
    v = val_p(x, p)
    return x / Fraction(p) ** v


def residue_of_unit(x: Rational, p: int, modulus: Optional[int] = None) -> int:
    """Reduce a rational p-adic unit (or integer of valuation >= 0) mod p^k."""
    m = modulus if modulus is not None else p
    f = Fraction(x)
    if f.denominator % p == 0:
        raise ValueError("not p-integral")
    return f.numerator * pow(f.denominator, -1, m) % m


def square_class_qp(x: Rational, p: int) -> SquareClassQp:
    """Square class of a nonzero rational inside Q_p^x / (Q_p^x)^2.

    Depends only on the parity of val_p(x) and on whether the unit part is a
    quadratic residue mod p.
    """
    check_odd_prime(p)
    x = Fraction(x)
    if x == 0:
        raise ValueError("x = 0 has no square class")
    v = val_p(x, p)
    r = residue_of_unit(unit_part(x, p), p)
    square_unit = is_residue(r, p)
    if v % 2 == 0:
        tag = "1" if square_unit else "u"
    else:
        tag = "p" if square_unit else "up"
    return SquareClassQp(tag, p)


def square_class_fp(x: FpScalar) -> str:
    """One of 'zero', 'square', 'nonsquare' for an element of F_p."""
    if x.residue % x.prime == 0:
        return "zero"
    return "square" if is_residue(x.residue, x.prime) else "nonsquare"


def sqrt_mod_p(a: int, p: int) -> Optional[int]:
    # brute force; p is desk-scale
    a %= p
    for r in range(p):
        if r * r % p == a:
            return r
    return None


def padic_sqrt(x, digits: int = 12, p: Optional[int] = None) -> Optional[int]:
    """Square root of the unit part of x, Hensel-lifted to ``digits`` p-adic
    digits.

    Returns an integer a in [1, p^digits) with a^2 = x / p^(2*floor(v/2))
    mod p^digits whenever x has even valuation v and its unit part is a
    residue mod p; returns None ("no root") otherwise.  Among the two roots,
    the one whose residue mod p is smallest is returned.
    """
    if isinstance(x, PadicScalar):
        p = x.prime
        f = x.as_fraction()
    else:
        if p is None:
            raise ValueError("p required for plain rational input")
        f = Fraction(x)
    check_odd_prime(p)
    if digits < 1:
        raise ValueError("digits must be >= 1")
    if f == 0:
        return None
    v = val_p(f, p)
    if v % 2 != 0:
        return None
    w = unit_part(f, p)
    modulus = p ** digits
    target = residue_of_unit(w, p, modulus)
    r = sqrt_mod_p(target % p, p)
    if r is None:
        return None
    r = min(r, p - r)
    # Newton iteration r <- (r + w/r)/2, doubling precision each pass
    k = 1
    inv2 = pow(2, -1, modulus)
    while k < digits:
        k = min(2 * k, digits)
        m = p ** k
        r = (r + target % m * pow(r, -1, m)) * inv2 % m
    assert r * r % modulus == target
    return r

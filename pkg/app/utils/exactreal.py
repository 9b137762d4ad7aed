"""
Exact rationals and approximable reals.

A real is a procedure ``prec -> Fraction`` whose answer is within 2^-prec of
the value. Nothing in lclab touches floating point.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from app.utils.errors import PreconditionFailed, UsageError

logger = logging.getLogger(__name__)

Rational = Fraction
RationalLike = Union[Fraction, int, str]


def dyadic(n: int) -> Fraction:
    """2^-n as an exact rational (n may be negative)."""
    if n >= 0:
        return Fraction(1, 2 ** n)
    return Fraction(2 ** (-n))


def to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return parse_rational(value)


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", an integer, or a finite decimal literal."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"Not a rational literal: {text!r}", {"literal": text}) from e


def format_rational(q: Fraction) -> str:
    """Serialize as "p/q" with an explicit denominator."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class Comparison(str, Enum):
    LESS = "LESS"
    GREATER = "GREATER"
    WITHIN_MARGIN = "WITHIN_MARGIN"


def _bound_bits(q: Fraction) -> int:
    # smallest k with |q| <= 2^k
    n = abs(q)
    k = 0
    while n > 2 ** k:
        k += 1
    return k


@dataclass(frozen=True)
class ApproxReal:
    """A real given by rational approximations: |approx(p) - value| <= 2^-p."""

    approx: Callable[[int], Fraction]
    label: str = ""

    @classmethod
    def const(cls, value: RationalLike) -> "ApproxReal":
        q = to_rational(value)
        return cls(lambda prec: q, label=format_rational(q))

    def __call__(self, prec: int) -> Fraction:
        if prec < 0:
            raise PreconditionFailed(f"Precision must be natural, got {prec}")
        return self.approx(prec)

    def __add__(self, other: "ApproxReal") -> "ApproxReal":
        other = _lift(other)
        return ApproxReal(lambda p: self(p + 1) + other(p + 1), f"({self.label} + {other.label})")

    def __radd__(self, other: RationalLike) -> "ApproxReal":
        return _lift(other) + self

    def __sub__(self, other: "ApproxReal") -> "ApproxReal":
        other = _lift(other)
        return ApproxReal(lambda p: self(p + 1) - other(p + 1), f"({self.label} - {other.label})")

    def __rsub__(self, other: RationalLike) -> "ApproxReal":
        return _lift(other) - self

    def __neg__(self) -> "ApproxReal":
        return ApproxReal(lambda p: -self(p), f"-{self.label}")

    def __abs__(self) -> "ApproxReal":
        return ApproxReal(lambda p: abs(self(p)), f"|{self.label}|")

    def __mul__(self, other: "ApproxReal") -> "ApproxReal":
        other = _lift(other)

        def approx(p: int) -> Fraction:
            # |xy - x'y'| <= |x||y - y'| + |y'||x - x'|
            bx = abs(self(0)) + 1
            by = abs(other(0)) + 2
            k = p + _bound_bits(bx + by) + 1
            return self(k) * other(k)

        return ApproxReal(approx, f"({self.label} * {other.label})")

    def __rmul__(self, other: RationalLike) -> "ApproxReal":
        return _lift(other) * self


def _lift(value: Union[ApproxReal, RationalLike]) -> ApproxReal:
    if isinstance(value, ApproxReal):
        return value
    return ApproxReal.const(value)


def rmin(*terms: Union[ApproxReal, RationalLike]) -> ApproxReal:
    reals = [_lift(t) for t in terms]
    return ApproxReal(lambda p: min(r(p) for r in reals), "min(" + ", ".join(r.label for r in reals) + ")")


def rmax(*terms: Union[ApproxReal, RationalLike]) -> ApproxReal:
    reals = [_lift(t) for t in terms]
    return ApproxReal(lambda p: max(r(p) for r in reals), "max(" + ", ".join(r.label for r in reals) + ")")


def rsup(terms: Iterable[Union[ApproxReal, RationalLike]]) -> ApproxReal:
    """Supremum over a finite, non-empty index set."""
    reals = [_lift(t) for t in terms]
    if not reals:
        raise PreconditionFailed("sup over an empty index set")
    return rmax(*reals)


def interval_eval(expr: Union[ApproxReal, RationalLike], prec: int) -> Fraction:
    """Evaluate an expression built from +, -, *, min, max, abs and finite sup to within 2^-prec."""
    value = _lift(expr)(prec)
    logger.debug(f"interval_eval {value} at prec {prec}")
    return value


def approx_compare(a: ApproxReal, b: ApproxReal, margin: RationalLike) -> Comparison:
    """
    Three-way comparison with slack.

    Refines both sides until their approximations are separated or their
    distance is certified below 2 * margin. Always terminates.
    """
    margin = to_rational(margin)
    if margin <= 0:
        raise PreconditionFailed(f"margin must be positive, got {margin}")
    k = 0
    while True:
        da, db = a(k), b(k)
        err = 2 * dyadic(k)
        if db - da > err:
            return Comparison.LESS
        if da - db > err:
            return Comparison.GREATER
        if abs(da - db) + err < 2 * margin:
            return Comparison.WITHIN_MARGIN
        k += 1


def check_consistency(a: ApproxReal, n_max: int) -> bool:
    """Consecutive approximations differ by at most 2^-n + 2^-(n+1)."""
    values: Sequence[Fraction] = [a(n) for n in range(n_max + 2)]
    return all(abs(values[n] - values[n + 1]) <= dyadic(n) + dyadic(n + 1) for n in range(n_max + 1))

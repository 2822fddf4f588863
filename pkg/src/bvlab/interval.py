"""Outward-rounded interval arithmetic on binary64.

Every numeric constant in the workbench is carried as a RigorousValue,
an interval [lo, hi] guaranteed to contain the exact real value.  The
enclosure survives composition: each arithmetic step rounds its lower
bound down and its upper bound up.

Rigor model
-----------
Hardware rounding-mode control is not portable from pure Python, so
directed rounding is emulated by nudging computed bounds outward with
math.nextafter:

* +, -, *, /, sqrt are correctly rounded by IEEE-754, so the true result
  lies within half an ulp of the computed one; a single nextafter step
  (a full ulp or more) is a valid outward bound.
* exp, log, log1p come from libm with error assumed below 1 ulp; two
  nextafter steps cover that.
* math.fsum is exactly rounded (error at most half an ulp of the true
  sum, independent of summation order), so one step suffices.  This is
  also why long accumulations here go through fsum: the result is a
  deterministic function of the value multiset alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ConsistencyError, DomainError

_INF = math.inf

Number = Union[int, float, Fraction]


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _down2(x: float) -> float:
    return math.nextafter(math.nextafter(x, -_INF), -_INF)


def _up2(x: float) -> float:
    return math.nextafter(math.nextafter(x, _INF), _INF)


def _float_pair_from_fraction(fr: Fraction) -> tuple:
    """Tightest float pair lo <= fr <= hi (exact when fr is representable)."""
    f = float(fr)  # correctly rounded
    if math.isinf(f):
        return (math.nextafter(_INF, 0.0), _INF) if f > 0 else (-_INF, math.nextafter(-_INF, 0.0))
    as_fr = Fraction(f)
    if as_fr == fr:
        return f, f
    if as_fr < fr:
        return f, _up(f)
    return _down(f), f


@dataclass(frozen=True)
class RigorousValue:
    """Closed interval [lo, hi] containing an exact real value."""

    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise DomainError("NaN endpoint in enclosure")
        if self.lo > self.hi:
            raise DomainError(f"empty enclosure [{self.lo}, {self.hi}]")

    # -- constructors -------------------------------------------------

    @staticmethod
    def exact(x: Number) -> "RigorousValue":
        """Enclosure of a value that is known exactly.

        Integers and fractions are converted with outward rounding when
        they are not representable in binary64.
        """
        if isinstance(x, float):
            return RigorousValue(x, x)
        lo, hi = _float_pair_from_fraction(Fraction(x))
        return RigorousValue(lo, hi)

    @staticmethod
    def from_fractions(lo: Fraction, hi: Fraction) -> "RigorousValue":
        flo, _ = _float_pair_from_fraction(Fraction(lo))
        _, fhi = _float_pair_from_fraction(Fraction(hi))
        return RigorousValue(flo, fhi)

    @staticmethod
    def from_decimal(lo: str, hi: str = None) -> "RigorousValue":
        """Enclosure from decimal literals, e.g. catalog fixtures."""
        return RigorousValue.from_fractions(Fraction(lo), Fraction(hi if hi is not None else lo))

    @staticmethod
    def hull_of(values: Iterable["RigorousValue"]) -> "RigorousValue":
        vals = list(values)
        if not vals:
            raise DomainError("hull of no intervals")
        return RigorousValue(min(v.lo for v in vals), max(v.hi for v in vals))

    # -- inspection ---------------------------------------------------

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        if math.isinf(self.lo) or math.isinf(self.hi):
            return self.lo if math.isinf(self.hi) else self.hi
        return self.lo + 0.5 * (self.hi - self.lo)

    def contains(self, x: Number) -> bool:
        if isinstance(x, float):
            return self.lo <= x <= self.hi
        fr = Fraction(x)
        return Fraction(self.lo) <= fr and fr <= Fraction(self.hi)

    def encloses(self, other: "RigorousValue") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersects(self, other: "RigorousValue") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def certainly_lt(self, other: "RigorousValue") -> bool:
        return self.hi < other.lo

    def certainly_le(self, other: "RigorousValue") -> bool:
        return self.hi <= other.lo

    def certainly_positive(self) -> bool:
        return self.lo > 0.0

    def certainly_nonnegative(self) -> bool:
        return self.lo >= 0.0

    def __repr__(self):
        return f"RigorousValue({self.lo!r}, {self.hi!r})"

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "RigorousValue":
        if isinstance(other, RigorousValue):
            return other
        if isinstance(other, (int, float, Fraction)):
            return RigorousValue.exact(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RigorousValue(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return RigorousValue(-self.hi, -self.lo)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RigorousValue(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        cands = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        lo = _down(min(cands))
        if self.lo >= 0.0 and o.lo >= 0.0:
            lo = max(0.0, lo)  # sign is certain; keep underflow from flipping it
        return RigorousValue(lo, _up(max(cands)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.lo <= 0.0 <= o.hi:
            raise DomainError("division by an enclosure containing zero")
        cands = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        lo = _down(min(cands))
        if self.lo >= 0.0 and o.lo > 0.0:
            lo = max(0.0, lo)
        return RigorousValue(lo, _up(max(cands)))

    def __rtruediv__(self, other):
        return RigorousValue.exact(other).__truediv__(self)

    def __abs__(self):
        if self.lo >= 0.0:
            return self
        if self.hi <= 0.0:
            return -self
        return RigorousValue(0.0, max(-self.lo, self.hi))

    def pow_int(self, n: int) -> "RigorousValue":
        """Integer power by repeated interval squaring (any sign of base)."""
        if n == 0:
            return RigorousValue(1.0, 1.0)
        if n < 0:
            # invert first: huge positive powers would overflow to inf,
            # while the reciprocal route merely underflows gracefully
            return (RigorousValue(1.0, 1.0) / self).pow_int(-n)
        result = RigorousValue(1.0, 1.0)
        base = self
        e = n
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def sqrt(self) -> "RigorousValue":
        if self.lo < 0.0:
            raise DomainError("sqrt of an enclosure reaching below zero")
        lo = _down(math.sqrt(self.lo))
        return RigorousValue(max(0.0, lo), _up(math.sqrt(self.hi)))

    def exp(self) -> "RigorousValue":
        try:
            lo = _down2(math.exp(self.lo))
        except OverflowError:
            lo = _down2(math.float_info.max)
        try:
            hi = _up2(math.exp(self.hi))
        except OverflowError:
            hi = _INF
        return RigorousValue(max(0.0, lo), hi)

    def log(self) -> "RigorousValue":
        if self.lo <= 0.0:
            raise DomainError("log of an enclosure touching zero or below")
        return RigorousValue(_down2(math.log(self.lo)), _up2(math.log(self.hi)))

    def log1p(self) -> "RigorousValue":
        if self.lo <= -1.0:
            raise DomainError("log1p of an enclosure touching -1 or below")
        return RigorousValue(_down2(math.log1p(self.lo)), _up2(math.log1p(self.hi)))


# -- module-level helpers ---------------------------------------------

ZERO = RigorousValue(0.0, 0.0)
ONE = RigorousValue(1.0, 1.0)
PI = RigorousValue(_down(math.pi), _up(math.pi))


def interval_op(op: str, *values: RigorousValue) -> RigorousValue:
    """Apply a named operation to enclosures.

    Supported: add, sub, mul, div (binary); log, exp, sqrt (unary);
    pow (interval base, integer exponent).
    """
    binary = {"add": RigorousValue.__add__, "sub": RigorousValue.__sub__,
              "mul": RigorousValue.__mul__, "div": RigorousValue.__truediv__}
    unary = {"log": RigorousValue.log, "exp": RigorousValue.exp,
             "sqrt": RigorousValue.sqrt}
    if op in binary:
        if len(values) != 2:
            raise DomainError(f"{op} expects 2 operands")
        return binary[op](values[0], values[1])
    if op in unary:
        if len(values) != 1:
            raise DomainError(f"{op} expects 1 operand")
        return unary[op](values[0])
    if op == "pow":
        if len(values) != 2 or values[1].lo != values[1].hi or values[1].lo != int(values[1].lo):
            raise DomainError("pow expects an interval base and an exact integer exponent")
        return values[0].pow_int(int(values[1].lo))
    raise DomainError(f"unknown interval op {op!r}")


def intersect_enclosures(a: RigorousValue, b: RigorousValue) -> RigorousValue:
    """Intersection of two enclosures of the same quantity.

    Both inputs must contain the true value, so a disjoint pair means one
    of the two routes is wrong; that is flagged as a consistency failure.
    """
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if lo > hi:
        raise ConsistencyError(
            f"enclosures [{a.lo}, {a.hi}] and [{b.lo}, {b.hi}] are disjoint")
    return RigorousValue(lo, hi)


def sum_intervals(values: Sequence[RigorousValue]) -> RigorousValue:
    """Enclosure of a sum of enclosures via one exactly rounded fsum per bound."""
    if not values:
        return ZERO
    return RigorousValue(_down(math.fsum(v.lo for v in values)),
                         _up(math.fsum(v.hi for v in values)))


def fsum_enclosure(terms: Iterable[float], abs_error_budget: float = 0.0) -> RigorousValue:
    """Enclosure of sum(true terms) from computed float terms.

    abs_error_budget bounds the total absolute error the computed terms
    carry relative to the true ones; it is added outward on both sides.
    """
    s = math.fsum(terms)
    lo = _down(s)
    hi = _up(s)
    if abs_error_budget:
        lo = _down(lo - abs_error_budget)
        hi = _up(hi + abs_error_budget)
    return RigorousValue(lo, hi)


def log_interval_of(x: Number) -> RigorousValue:
    """Enclosure of log(x) for an exact positive number."""
    v = RigorousValue.exact(x)
    return v.log()


def exp_bound_interval(exponent: int) -> RigorousValue:
    """Enclosure [0, upper] for e**exponent with a very negative exponent.

    e**-2000 underflows binary64; the stored upper endpoint is the
    smallest positive float that still bounds it from above.
    """
    e = RigorousValue.exact(exponent).exp()
    return RigorousValue(0.0, e.hi)

"""Sieve-parameter calculus and the threshold-exponent inequality.

For a quality exponent A the argument runs a sieve of dimension 1 at
level D = x^(1/2) log x with rough-number cutoff R^2, R = log^(A+3) x.
This module computes the derived parameters

    s    = log D / (2 log R) = log x/(4(A+3) loglog x) + 1/(2A+6),
    b    = 4 + s/log(2s),
    eps1 = 1 - 4(A+3) s log s / log x,
    eps2 = [s(3 + loglog 2) + log 2s (+ 5 log 2b)] / (s log s),

and decides the inequality that certifies a threshold exponent T
(playing the role of log x):

    T(1-eps1)(1-eps2)/(4(A+3)) + 2 loglog R - log(1+8 log^-2 R)
        > (A+3) log T.

The eps2 numerator admits two readings.  The fully spelled-out form
carries the boundary factor 5 log(2b); with it the inequality fails
at every tabulated threshold exponent, so the default here drops that
term (the variant the tabulated rows actually satisfy) and the
spelled-out form stays available behind include_boundary_factor=True.

Everything is evaluated in interval arithmetic; the decision is made
only when the enclosures separate, so a True/False answer is a
certificate, not a float comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import ConsistencyError, DomainError
from .interval import RigorousValue

_E = math.e
_E_TO_E = math.exp(math.e)


@dataclass(frozen=True)
class ThresholdParams:
    """Derived sieve parameters at a point (A, log x)."""

    a: int
    log_x: float
    x: float                      # inf when e**log_x overflows binary64
    log_d: RigorousValue          # log(x^(1/2) log x)
    d: float                      # inf when not representable
    s: RigorousValue
    b: RigorousValue
    eps1: RigorousValue
    eps2: RigorousValue           # spelled-out numerator (with 5 log 2b)
    eps2_reduced: RigorousValue   # numerator without the boundary factor
    side_s_large: bool            # s > b + 1
    side_sieve_ok: bool           # 1 - e^(1+1/b)/b > 1/e

    @property
    def side_ok(self) -> bool:
        return self.side_s_large and self.side_sieve_ok


def _require_a(a: int) -> int:
    if not 2 <= a <= 7:
        raise DomainError(f"A must be in [2, 7], got {a}")
    return a


def _eps2_pieces(s: RigorousValue):
    log_s = s.log()
    s_log_s = s * log_s
    three_plus = 3 + RigorousValue.exact(2).log().log()
    base_num = s * three_plus + (2 * s).log()
    b = 4 + s / (2 * s).log()
    boundary = 5 * (2 * b).log()
    return log_s, s_log_s, b, base_num, boundary


def threshold_params(a: int, x: Optional[float] = None, *,
                     log_x: Optional[float] = None) -> ThresholdParams:
    """Evaluate the sieve parameters at (A, x), accepting x or log x.

    Thresholds of interest have log x in the thousands, far beyond
    float range for x itself, hence the keyword alternative.
    """
    a = _require_a(a)
    if (x is None) == (log_x is None):
        raise DomainError("supply exactly one of x or log_x")
    if x is not None:
        if x <= _E_TO_E:
            raise DomainError("x must exceed e**e so that loglog x > 1")
        log_x = math.log(x)
    else:
        if log_x <= _E:
            raise DomainError("log_x must exceed e so that loglog x > 1")
        x = math.exp(log_x) if log_x < 709 else math.inf

    t = RigorousValue.exact(log_x)
    log_t = t.log()
    log_d = t / 2 + log_t
    d = math.exp(log_d.mid) if log_d.mid < 709 else math.inf

    s = t / (RigorousValue.exact(4 * (a + 3)) * log_t) \
        + RigorousValue.exact(Fraction(1, 2 * a + 6))
    log_s, s_log_s, b, base_num, boundary = _eps2_pieces(s)
    eps1 = 1 - RigorousValue.exact(4 * (a + 3)) * s_log_s / t
    eps2 = (base_num + boundary) / s_log_s
    eps2_reduced = base_num / s_log_s

    side_s_large = (b + 1).certainly_lt(s)
    one = RigorousValue.exact(1)
    sieve_lhs = one - (one + one / b).exp() / b
    side_sieve = RigorousValue.exact(-1).exp().certainly_lt(sieve_lhs)

    return ThresholdParams(a=a, log_x=log_x, x=x, log_d=log_d, d=d, s=s, b=b,
                           eps1=eps1, eps2=eps2, eps2_reduced=eps2_reduced,
                           side_s_large=side_s_large, side_sieve_ok=side_sieve)


def threshold_inequality_check(a: int, t: int,
                               include_boundary_factor: bool = False) -> bool:
    """Certify the threshold inequality at exponent T (= log x).

    Returns True only when the interval evaluation separates the two
    sides in the stated direction, False when it separates the other
    way; an undecidably thin margin raises a consistency error rather
    than guessing.
    """
    a = _require_a(a)
    if t < 16:
        raise DomainError("threshold exponent must satisfy log log x > 1")
    params = threshold_params(a, log_x=float(t))
    s_log_s = params.s * params.s.log()
    eps2 = params.eps2 if include_boundary_factor else params.eps2_reduced
    log_r = RigorousValue.exact(a + 3) * RigorousValue.exact(float(t)).log()
    lhs = (1 - eps2) * s_log_s + 2 * log_r.log() \
        - (1 + 8 / log_r.pow_int(2)).log()
    rhs = log_r
    if rhs.certainly_lt(lhs):
        return True
    if lhs.certainly_le(rhs):
        return False
    raise ConsistencyError(
        f"threshold inequality at A={a}, T={t} is numerically undecided: "
        f"lhs=[{lhs.lo}, {lhs.hi}] vs rhs=[{rhs.lo}, {rhs.hi}]")

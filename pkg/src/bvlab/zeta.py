"""Enclosures of zeta and prime-zeta values at small rational arguments.

zeta uses Euler-Maclaurin with M = 40 initial terms and 4 correction
terms; for real s > 1 the remainder after K corrections is bounded in
absolute value by the first omitted correction term, which is what the
explicit remainder enclosure here uses.  All correction coefficients
B_{2j}/(2j)! and Pochhammer products are exact fractions; only the final
powers of M are interval-rounded.

prime_zeta(s) = sum over primes of p^-s is computed from the Moebius
inversion P(s) = sum_{k>=1} mu(k)/k * log zeta(ks), truncated at k = 40
with a rigorous tail bound (for t >= 61, log zeta(t) <= 1.001 * 2^-t).

Arguments are fractions with denominator 1 or 2: integer and half-integer
exponents are the only ones the Euler-product tails need, and they keep
every power computable from integer powering plus one square root.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError
from .interval import RigorousValue, sum_intervals

# B_{2j}/(2j)! for 2j = 2, 4, 6, 8, 10
_EM_COEFFS = (
    Fraction(1, 12),
    Fraction(-1, 720),
    Fraction(1, 30240),
    Fraction(-1, 1209600),
    Fraction(1, 47900160),
)

_EM_M = 40
_EM_K = 4
_PRIME_ZETA_TERMS = 40


def _check_half_integer(s: Fraction) -> Fraction:
    s = Fraction(s)
    if s.denominator not in (1, 2):
        raise DomainError(f"exponent {s} is not an integer or half-integer")
    return s


def rational_power(n: int, s: Fraction) -> RigorousValue:
    """Enclosure of n**s for integer n >= 1, s integer or half-integer."""
    if n < 1:
        raise DomainError("rational_power needs a positive integer base")
    s = _check_half_integer(s)
    if s.denominator == 1:
        return RigorousValue.exact(n).pow_int(s.numerator)
    # take the root first so the exponent magnitude is halved before powering
    return RigorousValue.exact(n).sqrt().pow_int(s.numerator)


def _pochhammer(s: Fraction, count: int) -> Fraction:
    out = Fraction(1)
    for i in range(count):
        out *= s + i
    return out


@lru_cache(maxsize=None)
def _zeta_euler_maclaurin(s: Fraction) -> RigorousValue:
    if s <= 1:
        raise DomainError("zeta enclosure requires s > 1")
    m = _EM_M
    parts = [rational_power(n, -s) for n in range(1, m)]
    # integral term M^(1-s)/(s-1) and the boundary M^-s / 2
    parts.append(rational_power(m, 1 - s) / RigorousValue.exact(s - 1))
    parts.append(rational_power(m, -s) * RigorousValue.exact(Fraction(1, 2)))
    for j in range(1, _EM_K + 1):
        coeff = _EM_COEFFS[j - 1] * _pochhammer(s, 2 * j - 1)
        parts.append(RigorousValue.exact(coeff) * rational_power(m, -(s + 2 * j - 1)))
    # remainder: bounded by the first omitted correction term
    rem_coeff = abs(_EM_COEFFS[_EM_K] * _pochhammer(s, 2 * _EM_K + 1))
    rem = RigorousValue.exact(rem_coeff) * rational_power(m, -(s + 2 * _EM_K + 1))
    parts.append(RigorousValue(-rem.hi, rem.hi))
    return sum_intervals(parts)


def zeta_value(s) -> RigorousValue:
    """Enclosure of zeta(s) for integer or half-integer s > 1.

    Accepts 2, 3, 1.5, Fraction(3, 2) or the strings "2", "3", "3/2".
    The catalog uses s in {3/2, 2, 3, 6}.
    """
    if isinstance(s, str):
        s = Fraction(s)
    s = _check_half_integer(Fraction(s))
    if s <= 1:
        raise DomainError(f"zeta_value needs s > 1, got {s}")
    return _zeta_euler_maclaurin(s)


def zeta_any(s: Fraction) -> RigorousValue:
    """Enclosure of zeta(s) for any integer/half-integer s > 1 (internal)."""
    return _zeta_euler_maclaurin(_check_half_integer(s))


def _mobius_small(k: int) -> int:
    out = 1
    d = 2
    while d * d <= k:
        if k % d == 0:
            k //= d
            if k % d == 0:
                return 0
            out = -out
        d += 1
    if k > 1:
        out = -out
    return out


@lru_cache(maxsize=None)
def prime_zeta(s: Fraction) -> RigorousValue:
    """Enclosure of sum over all primes p of p**-s, for s >= 3/2."""
    s = _check_half_integer(s)
    if s < Fraction(3, 2):
        raise DomainError("prime_zeta implemented for s >= 3/2")
    k_max = _PRIME_ZETA_TERMS
    parts = []
    for k in range(1, k_max + 1):
        mu = _mobius_small(k)
        if mu == 0:
            continue
        term = zeta_any(k * s).log() * RigorousValue.exact(Fraction(mu, k))
        parts.append(term)
    # tail: sum_{k>k_max} |mu(k)/k| log zeta(ks) <= 1.001/(k_max+1)
    #       * 2^-(k_max+1)s / (1 - 2^-s), valid since (k_max+1)s >= 61
    geom = rational_power(2, Fraction(-(k_max + 1)) * s) / (
        RigorousValue.exact(1) - rational_power(2, -s))
    tail = (RigorousValue.exact(Fraction(1001, 1000 * (k_max + 1))) * geom).hi
    parts.append(RigorousValue(-tail, tail))
    return sum_intervals(parts)

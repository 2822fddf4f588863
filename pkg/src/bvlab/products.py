"""Rigorous enclosures for the Euler products in the constant catalog.

Every product here has a local factor that is a rational function of
t = p^(-1/2) with numerator and denominator polynomials of constant
term 1.  The enclosure splits at a cutoff P:

* primes p <= P: the local factors are evaluated in floating point
  with an explicit per-term error budget, accumulated through log1p
  and an exactly-rounded fsum, and returned as an interval;

* primes p > P: log of the tail equals sum over k of l_k * S(k/2),
  where l_k are the exact rational log-series coefficients of N/D and
  S(s) = sum of p^(-s) over p > P.  The series is truncated at k = 16
  with a rigorous remainder: |sum_{k>16} l_k t^k| <= c_R * t^17 for
  all t <= 1/10, where c_R majorizes the coefficient tails through
  -log(1 - W(tau)) at tau = 1/5.  Each S(s) is enclosed as
  prime_zeta(s) minus a budgeted partial sum.

Two tail modes are provided.  The default "two_sided" mode encloses
the tail value itself, giving widths near the floating-point floor
(~1e-13 at cutoff 1e6).  The "upper" mode keeps the in-range interval
and multiplies by [1, exp(tail upper bound)]; it is wider but its
width is dominated by the tail magnitude, so doubling the cutoff
strictly shrinks it — the form the enclosure-monotonicity property
is stated for.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from .errors import DomainError
from .interval import (RigorousValue, fsum_enclosure, intersect_enclosures,
                       sum_intervals)
from .tables import factorize_int, primes_up_to
from .zeta import prime_zeta, rational_power, zeta_value

DEFAULT_CUTOFF = 10 ** 6
_SERIES_ORDER = 16
_TAU = Fraction(1, 5)  # majorant radius; cutoff >= 100 keeps t <= 1/10 < tau
_ULP = 2.0 ** -53

# local factor N(t)/D(t), coefficients indexed by power of t
_POLYS: Dict[str, Tuple[List[Fraction], List[Fraction]]] = {
    # 1 + 1/(p(p-1))   (totient-sum constant)
    "C2": ([1, 0, -1, 0, 1], [1, 0, -1]),
    # 1 + 1/(p-1)^2    (squarefree mu^2/phi^2 constant)
    "C5": ([1, 0, -2, 0, 2], [1, 0, -2, 0, 1]),
    # 1 + p/((p-1)(p^(3/2)+1)), with zeta(3/2)/zeta(3) prefactor
    "B3": ([1, 0, -1, 2, 0, -1], [1, 0, -1, 1, 0, -1]),
    # (1 + 2/(sqrt(p)(p-1))) (1 + 2 sqrt(p)/((p-1)^2 (1 + 2/(sqrt(p)(p-1)))))
    "B4": ([1, 0, -2, 4, 1, -2], [1, 0, -2, 0, 1]),
    # 1 + 2/(sqrt(p)(p-1))
    "B5": ([1, 0, -1, 2], [1, 0, -1]),
}
_ZETA_PREFACTOR_IDS = {"B3"}
_PARAMETRIC_RE = re.compile(r"^(B[12])\((\d+)\)$")


def _local_term(pid: str, p: np.ndarray) -> np.ndarray:
    """f(p) with local factor 1 + f(p); p is a float64 array."""
    if pid == "C2":
        return 1.0 / (p * (p - 1.0))
    if pid == "C5":
        return 1.0 / ((p - 1.0) ** 2)
    if pid == "B3":
        return p / ((p - 1.0) * (p * np.sqrt(p) + 1.0))
    if pid == "B4":
        return 2.0 / (np.sqrt(p) * (p - 1.0)) + 2.0 * np.sqrt(p) / ((p - 1.0) ** 2)
    if pid == "B5":
        return 2.0 / (np.sqrt(p) * (p - 1.0))
    raise DomainError(f"unknown product id {pid!r}")


def _log_series(poly: List[Fraction], order: int) -> List[Fraction]:
    """Exact coefficients c_1..c_order of log(poly(t)), poly(0) = 1."""
    q = [Fraction(c) for c in poly] + [Fraction(0)] * (order + 1 - len(poly))
    c = [Fraction(0)] * (order + 1)
    for k in range(1, order + 1):
        acc = k * q[k]
        for i in range(1, k):
            acc -= i * c[i] * q[k - i]
        c[k] = acc / k
    return c


def _majorant_log(poly: List[Fraction], tau: Fraction) -> RigorousValue:
    """Upper interval for sum_k |c_k| tau^k via -log(1 - W(tau))."""
    w = sum(abs(Fraction(c)) * tau ** i for i, c in enumerate(poly) if i > 0)
    if w >= 1:
        raise DomainError("majorant radius too large for this polynomial")
    one_minus = RigorousValue.from_fractions(1 - w, 1 - w)
    return -one_minus.log()


_PRIMES_CACHE: Dict[int, np.ndarray] = {}
_PARTIAL_CACHE: Dict[Tuple[int, Fraction], RigorousValue] = {}


def _primes(cutoff: int) -> np.ndarray:
    if cutoff not in _PRIMES_CACHE:
        if len(_PRIMES_CACHE) > 8:
            _PRIMES_CACHE.clear()
        _PRIMES_CACHE[cutoff] = primes_up_to(cutoff).astype(np.float64)
    return _PRIMES_CACHE[cutoff]


def _partial_prime_sum(cutoff: int, s: Fraction) -> RigorousValue:
    """Enclosure of sum over p <= cutoff of p^(-s)."""
    key = (cutoff, s)
    if key not in _PARTIAL_CACHE:
        p = _primes(cutoff)
        terms = np.exp(float(-s) * np.log(p))
        rel = (8.0 + 6.0 * float(s) * math.log(cutoff)) * _ULP
        total_abs = math.fsum(terms.tolist())
        _PARTIAL_CACHE[key] = fsum_enclosure(terms.tolist(), rel * total_abs)
    return _PARTIAL_CACHE[key]


def _tail_prime_sum(cutoff: int, s: Fraction) -> RigorousValue:
    """Enclosure of sum over p > cutoff of p^(-s).

    Two independent enclosures are intersected: the difference
    prime_zeta(s) - partial_sum(s), whose width is a fixed multiple of
    the working precision, and the crude but absolutely-scaled bracket
    [0, cutoff^(1-s)/(s-1)] from comparing the sum over n > cutoff with
    the integral of t^(-s).  For large s the bracket is far tighter
    than the difference (whose width would otherwise swamp the tiny
    value); for small s the difference wins.
    """
    diff = prime_zeta(s) - _partial_prime_sum(cutoff, s)
    integral = rational_power(cutoff, 1 - s) / RigorousValue.exact(s - 1)
    bracket = RigorousValue(0.0, integral.hi)
    return intersect_enclosures(diff, bracket)


def _tail_log_bounds(pid: str, cutoff: int) -> Tuple[RigorousValue, RigorousValue]:
    """(two-sided enclosure, upper bound) of sum over p > cutoff of log f(p)."""
    num, den = _POLYS[pid]
    cn = _log_series(num, _SERIES_ORDER)
    cd = _log_series(den, _SERIES_ORDER)
    coeffs = [cn[k] - cd[k] for k in range(_SERIES_ORDER + 1)]

    pieces = []
    upper_pieces = []
    for k in range(1, _SERIES_ORDER + 1):
        if coeffs[k] == 0:
            continue
        lk = RigorousValue.from_fractions(coeffs[k], coeffs[k])
        s_tail = _tail_prime_sum(cutoff, Fraction(k, 2))
        pieces.append(lk * s_tail)
        upper_pieces.append(abs(lk) * s_tail)

    c_r = (_majorant_log(num, _TAU) + _majorant_log(den, _TAU)) \
        * RigorousValue.from_fractions(_TAU ** -(_SERIES_ORDER + 1),
                                       _TAU ** -(_SERIES_ORDER + 1))
    rem_mag = (c_r * _tail_prime_sum(cutoff, Fraction(_SERIES_ORDER + 1, 2))).hi
    remainder = RigorousValue(-rem_mag, rem_mag)

    enclosure = sum_intervals(pieces) + remainder
    upper = sum_intervals(upper_pieces) + RigorousValue(0.0, rem_mag)
    return enclosure, upper


def _in_range_log(pid: str, cutoff: int) -> RigorousValue:
    p = _primes(cutoff)
    logs = np.log1p(_local_term(pid, p))
    budget = 32.0 * _ULP * math.fsum(np.abs(logs).tolist())
    return fsum_enclosure(logs.tolist(), budget)


def _zeta_prefactor() -> RigorousValue:
    return zeta_value(Fraction(3, 2)) / zeta_value(3)


def _finite_factor_b1(p: int) -> RigorousValue:
    # sqrt(p)(p-1) / (p^(3/2) + 1)
    sp = RigorousValue.exact(p).sqrt()
    num = sp * RigorousValue.exact(p - 1)
    den = sp * RigorousValue.exact(p) + RigorousValue.exact(1)
    return num / den


def _finite_factor_b5(p: int) -> RigorousValue:
    # 1 + 2/(sqrt(p)(p-1))
    sp = RigorousValue.exact(p).sqrt()
    return RigorousValue.exact(1) + RigorousValue.exact(2) / (sp * RigorousValue.exact(p - 1))


def _product_over(values) -> RigorousValue:
    out = RigorousValue.exact(1)
    for v in values:
        out = out * v
    return out


@lru_cache(maxsize=4096)
def euler_product(pid: str, cutoff: int = DEFAULT_CUTOFF,
                  tail_mode: str = "two_sided") -> RigorousValue:
    """Rigorous enclosure of a catalog Euler product.

    pid is one of C2, C5, B3, B4, B5, or a parametric B1(l) / B2(l)
    with a positive integer l.  cutoff >= 100 splits the in-range and
    tail treatment; tail_mode is "two_sided" (default, tight) or
    "upper" (in-range interval times [1, exp(tail bound)]).
    """
    if cutoff < 100:
        raise DomainError("euler_product needs cutoff >= 100")
    if tail_mode not in ("two_sided", "upper"):
        raise DomainError(f"unknown tail_mode {tail_mode!r}")

    m = _PARAMETRIC_RE.match(pid)
    if m is not None:
        kind, l_str = m.group(1), m.group(2)
        l = int(l_str)
        if l < 1:
            raise DomainError("parametric product needs l >= 1")
        l_primes = [p for p, _ in factorize_int(l)]
        if kind == "B1":
            return _zeta_prefactor() * _product_over(
                _finite_factor_b1(p) for p in l_primes)
        # B2(l) = 4^omega(l) * B5 * prod over p | l of (1 + 2/(sqrt(p)(p-1)))^-1
        base = euler_product("B5", cutoff, tail_mode)
        scale = RigorousValue.exact(4).pow_int(len(l_primes))
        corr = _product_over(_finite_factor_b5(p) for p in l_primes)
        return scale * base / corr

    if pid not in _POLYS:
        raise DomainError(f"unknown product id {pid!r}")

    in_log = _in_range_log(pid, cutoff)
    tail_enclosure, tail_upper = _tail_log_bounds(pid, cutoff)
    if tail_mode == "two_sided":
        value = (in_log + tail_enclosure).exp()
    else:
        tail_factor = RigorousValue(1.0, RigorousValue(0.0, tail_upper.hi).exp().hi)
        value = in_log.exp() * tail_factor
    if pid in _ZETA_PREFACTOR_IDS:
        value = _zeta_prefactor() * value
    return value

"""Prime-counting sums over arithmetic progressions and their twists.

Everything here reduces to deterministic sums over the precomputed
prime-power / rough-number supports from :mod:`bvlab.tables`:

* ``psi_chi`` — the character twist sum over prime powers, summed with
  ``math.fsum`` separately on real and imaginary parts so results are
  bit-reproducible and exactly real for real characters;
* ``psi_progression`` / ``g_weighted_sums`` — restriction of the
  Chebyshev sum (resp. the rough-log sum G) to a residue class, with
  the discrepancy against the expected main term;
* ``f_R_decomposition`` — the conductor-limited remainder computed by
  two independent routes (direct-minus-small-conductors versus
  large-conductors-only) which must agree to 1e-9 relative;
* ``rough_count`` / ``phi_partial`` — exact integer counts used by the
  principal-character main terms.

The weighted sums use exact jump supports, so the partial-summation
identity G(x) = N(x) log x - sum over jumps can be checked without any
quadrature error beyond float rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .characters import DirichletCharacter, character_group
from .errors import ConsistencyError, DomainError
from .tables import FunctionTables, factorize_int, get_tables

DUAL_ROUTE_REL_TOL = 1e-9


@dataclass(frozen=True)
class ProgressionSums:
    """Sums over n <= x with n = a (mod q); unused parts stay None."""

    x: float
    q: int
    a: int
    psi: Optional[float] = None
    discrepancy: Optional[float] = None
    G: Optional[float] = None
    G1: Optional[float] = None


def _phi_exact(q: int) -> int:
    out = q
    for p, _ in factorize_int(q):
        out = out // p * (p - 1)
    return out


def _require_tables(x: float, tables: Optional[FunctionTables]) -> FunctionTables:
    n = int(math.floor(x))
    if tables is None:
        return get_tables(max(n, 2))
    tables._check(max(n, 1))
    return tables


def _check_progression(q: int, a: int) -> None:
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    if math.gcd(a, q) != 1:
        raise DomainError(f"residue {a} is not coprime to modulus {q}")


def psi_chi(x: float, chi: DirichletCharacter,
            tables: Optional[FunctionTables] = None) -> complex:
    """Sum of Lambda(n) chi(n) over n <= x, compensated in both parts."""
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    tables = _require_tables(x, tables)
    ns, ws = tables.prime_powers(int(math.floor(x)))
    vals = chi.value_table()[ns % chi.q]
    re = math.fsum(ws * vals.real)
    im = math.fsum(ws * vals.imag)
    return complex(re, im)


def psi_progression(x: float, q: int, a: int,
                    tables: Optional[FunctionTables] = None) -> ProgressionSums:
    """psi(x; q, a) and its distance from the expected share x/phi(q)."""
    _check_progression(q, a)
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    tables = _require_tables(x, tables)
    ns, ws = tables.prime_powers(int(math.floor(x)))
    psi = math.fsum(ws[ns % q == a % q])
    disc = abs(psi - x / _phi_exact(q))
    return ProgressionSums(x=x, q=q, a=a, psi=psi, discrepancy=disc)


def _rough_support(tables: FunctionTables, x: int, z: int) -> np.ndarray:
    """All 2 <= n <= x whose least prime factor exceeds z (n = 1 excluded)."""
    spf = tables.spf[: x + 1]
    mask = spf > z
    mask[:2] = False
    return np.flatnonzero(mask).astype(np.int64)


def g_weighted_sums(x: float, q: int, a: int, z: int,
                    tables: Optional[FunctionTables] = None) -> ProgressionSums:
    """G(x; q, a) = sum of log n over z-rough n = a (mod q), and its
    deviation G1 = G(x; q, a) - G(x)/phi(q)."""
    _check_progression(q, a)
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if z < 1:
        raise DomainError(f"roughness threshold must be >= 1, got {z}")
    tables = _require_tables(x, tables)
    ns = _rough_support(tables, int(math.floor(x)), z)
    logs = np.log(ns.astype(np.float64))
    g_total = math.fsum(logs)
    g_class = math.fsum(logs[ns % q == a % q])
    g1 = g_class - g_total / _phi_exact(q)
    return ProgressionSums(x=x, q=q, a=a, G=g_class, G1=g1)


def g_weighted_partial_summation(x: float, q: int, a: int, z: int,
                                 tables: Optional[FunctionTables] = None) -> float:
    """G(x; q, a) recomputed through the counting function: with N(t)
    the number of z-rough n <= t in the class, G = N(x) log x minus the
    exact sum of N over the jump gaps (no quadrature involved)."""
    _check_progression(q, a)
    tables = _require_tables(x, tables)
    ns = _rough_support(tables, int(math.floor(x)), z)
    ns = ns[ns % q == a % q]
    if ns.size == 0:
        return 0.0
    logs = np.log(ns.astype(np.float64))
    counts = np.arange(1, ns.size + 1, dtype=np.float64)
    upper = np.empty(ns.size, dtype=np.float64)
    upper[:-1] = logs[1:]
    upper[-1] = math.log(x)
    return counts[-1] * math.log(x) - math.fsum(counts * (upper - logs))


def rough_count(y: float, z: int, q: int, a: int,
                tables: Optional[FunctionTables] = None) -> int:
    """Exact number of n <= y with n = a (mod q) and least prime factor
    exceeding z; n = 1 counts as rough."""
    _check_progression(q, a)
    if y < 0:
        raise DomainError(f"y must be >= 0, got {y}")
    if y < 1:
        return 0
    tables = _require_tables(y, tables)
    ns = _rough_support(tables, int(math.floor(y)), z)
    count = int(np.count_nonzero(ns % q == a % q))
    if 1 % q == a % q:
        count += 1
    return count


def phi_partial(q: int, z: int) -> int:
    """phi_z(q) = q * prod over p | q with p > z of (1 - 1/p); an exact
    integer, and always >= phi(q)."""
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    out = Fraction(q)
    for p, _ in factorize_int(q):
        if p > z:
            out *= Fraction(p - 1, p)
    assert out.denominator == 1
    return int(out)


def _weight_support(tables: FunctionTables, x: int, weight: str,
                    r: int) -> Tuple[np.ndarray, np.ndarray]:
    if weight == "vonMangoldt":
        return tables.prime_powers(x)
    if weight == "gLog":
        ns = _rough_support(tables, x, r * r)
        return ns, np.log(ns.astype(np.float64))
    raise DomainError(f"unknown weight '{weight}' (use vonMangoldt or gLog)")


def f_R_decomposition(x: float, q: int, a: int, r: int,
                      weight: str = "vonMangoldt",
                      tables: Optional[FunctionTables] = None) -> float:
    """Remainder after removing all character contributions of conductor
    <= r, computed two independent ways and cross-checked.

    Route one subtracts the small-conductor character sums from the
    direct progression sum; route two adds up only the large-conductor
    character sums.  They must agree to 1e-9 relative or a
    ConsistencyError is raised.  The returned value is route two, which
    is exactly 0.0 when r >= q (no conductor above r exists).
    """
    _check_progression(q, a)
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if r < 1:
        raise DomainError(f"conductor cutoff must be >= 1, got {r}")
    tables = _require_tables(x, tables)
    xi = int(math.floor(x))
    ns, ws = _weight_support(tables, xi, weight, r)
    group = character_group(q)
    phi_q = len(group)

    direct = math.fsum(ws[ns % q == a % q])

    small_terms: List[complex] = []
    large_terms: List[complex] = []
    for chi in group:
        vals = chi.value_table()[ns % q]
        f_chi = complex(math.fsum(ws * vals.real), math.fsum(ws * vals.imag))
        term = chi(a).conjugate() * f_chi
        (small_terms if chi.conductor <= r else large_terms).append(term)
    small = math.fsum(t.real for t in small_terms) / phi_q
    large = math.fsum(t.real for t in large_terms) / phi_q

    route_one = direct - small
    route_two = large
    scale = max(1.0, abs(route_one), abs(route_two))
    if abs(route_one - route_two) > DUAL_ROUTE_REL_TOL * scale:
        raise ConsistencyError(
            f"conductor-split routes disagree at x={x}, q={q}, a={a}, "
            f"R={r}, weight={weight}: {route_one!r} vs {route_two!r}")
    return route_two

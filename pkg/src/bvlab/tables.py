"""Segmented sieves and exact multiplicative-function tables.

The central object is FunctionTables: a smallest-prime-factor (spf)
array up to a limit, built by a segmented sieve with a fixed 2**22
segment length.  Point queries (mu, phi, Lambda, d, omega, radical)
walk the spf chain of n, so they cost one step per prime factor.  Bulk
numpy arrays for the sweep machinery (phi, mu, d, omega for every n)
are derived lazily by independent slice sieves and cached.

Tables are immutable after build and safe to share across workers.

An optional on-disk cache stores the spf array as fixed-width
little-endian integers; set BVLAB_CACHE_DIR to enable it.
"""

from __future__ import annotations

import math
import os
import struct
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import CapacityError, DomainError

SEGMENT_LENGTH = 1 << 22
DEFAULT_MEMORY_CAP = 2 * 10 ** 8
CACHE_ENV_VAR = "BVLAB_CACHE_DIR"
_CACHE_MAGIC = b"BVLT"
_CACHE_VERSION = 1


def primes_up_to(n: int) -> np.ndarray:
    """Ascending int64 array of primes <= n (plain sieve, standalone)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_comp = np.zeros(n + 1, dtype=bool)
    is_comp[:2] = True
    for p in range(2, math.isqrt(n) + 1):
        if not is_comp[p]:
            is_comp[p * p:: p] = True
    return np.flatnonzero(~is_comp).astype(np.int64)


def factorize_int(n: int) -> List[Tuple[int, int]]:
    """Trial-division factorization, for inputs outside any table."""
    if n < 1:
        raise DomainError("factorize_int needs n >= 1")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _build_spf(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int32)
    base = primes_up_to(math.isqrt(limit))
    for lo in range(0, limit + 1, SEGMENT_LENGTH):
        hi = min(lo + SEGMENT_LENGTH, limit + 1)
        seg = spf[lo:hi]
        for p in base:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start >= hi:
                continue
            idx = np.arange(start - lo, hi - lo, p)
            unset = seg[idx] == 0
            seg[idx[unset]] = p
    # anything still unmarked above 1 is prime: its spf is itself
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[0] = 0
    if limit >= 1:
        spf[1] = 1
    return spf


def _cache_path(cache_dir: str, limit: int) -> str:
    return os.path.join(cache_dir, f"spf_{limit}.bvt")


def _save_cache(path: str, limit: int, spf: np.ndarray):
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<IQ", _CACHE_VERSION, limit))
        spf.astype("<i4").tofile(fh)
    os.replace(tmp, path)


def _load_cache(path: str, limit: int) -> Optional[np.ndarray]:
    try:
        with open(path, "rb") as fh:
            if fh.read(4) != _CACHE_MAGIC:
                return None
            version, stored = struct.unpack("<IQ", fh.read(12))
            if version != _CACHE_VERSION or stored != limit:
                return None
            spf = np.fromfile(fh, dtype="<i4", count=limit + 1)
    except OSError:
        return None
    if spf.size != limit + 1:
        return None
    return spf.astype(np.int32)


class FunctionTables:
    """Immutable sieve tables up to `limit` with exact accessors."""

    def __init__(self, limit: int, spf: np.ndarray):
        self.limit = limit
        self.spf = spf
        self._derived: Dict[str, np.ndarray] = {}
        self._prime_powers: Optional[Tuple[np.ndarray, np.ndarray]] = None

    # -- point queries --------------------------------------------

    def _check(self, n: int):
        if n < 1:
            raise DomainError(f"n must be >= 1, got {n}")
        if n > self.limit:
            raise CapacityError(f"n={n} beyond table limit {self.limit}")

    def factorize(self, n: int) -> List[Tuple[int, int]]:
        self._check(n)
        out = []
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def mu(self, n: int) -> int:
        self._check(n)
        spf = self.spf
        sign = 1
        while n > 1:
            p = int(spf[n])
            n //= p
            if n % p == 0:
                return 0
            sign = -sign
        return sign

    def phi(self, n: int) -> int:
        out = 1
        for p, e in self.factorize(n):
            out *= (p - 1) * p ** (e - 1)
        return out

    def Lambda(self, n: int) -> float:
        """von Mangoldt function on the natural-log scale."""
        self._check(n)
        if n == 1:
            return 0.0
        p = int(self.spf[n])
        m = n
        while m % p == 0:
            m //= p
        return math.log(p) if m == 1 else 0.0

    def d(self, n: int) -> int:
        out = 1
        for _, e in self.factorize(n):
            out *= e + 1
        return out

    def omega(self, n: int) -> int:
        return len(self.factorize(n))

    def radical(self, n: int) -> int:
        out = 1
        for p, _ in self.factorize(n):
            out *= p
        return out

    def is_prime(self, n: int) -> bool:
        self._check(n)
        return n >= 2 and int(self.spf[n]) == n

    def rough_indicator(self, n: int, z: int) -> int:
        """g(n): 1 when every prime factor of n exceeds z (g(1) = 1)."""
        self._check(n)
        if n == 1:
            return 1
        return 1 if int(self.spf[n]) > z else 0

    def sieved_lambda(self, n: int, z: int) -> float:
        """g(n) * Lambda(n): von Mangoldt restricted to z-rough prime powers."""
        return self.Lambda(n) if self.rough_indicator(n, z) else 0.0

    def h2(self, n: int) -> Fraction:
        """Exact prod over p | n of (1 - p^-2)^-1."""
        out = Fraction(1)
        for p, _ in self.factorize(n):
            out *= Fraction(p * p, p * p - 1)
        return out

    # -- bulk arrays (lazy, cached) --------------------------------

    def primes(self) -> np.ndarray:
        if "primes" not in self._derived:
            idx = np.arange(self.limit + 1, dtype=np.int32)
            mask = self.spf == idx
            mask[:2] = False
            self._derived["primes"] = np.flatnonzero(mask).astype(np.int64)
        return self._derived["primes"]

    def phi_array(self) -> np.ndarray:
        if "phi" not in self._derived:
            phi = np.arange(self.limit + 1, dtype=np.int64)
            for p in self.primes():
                p = int(p)
                phi[p::p] = phi[p::p] // p * (p - 1)
            self._derived["phi"] = phi
        return self._derived["phi"]

    def mu_array(self) -> np.ndarray:
        if "mu" not in self._derived:
            mu = np.ones(self.limit + 1, dtype=np.int8)
            mu[0] = 0
            for p in self.primes():
                p = int(p)
                mu[p::p] *= -1
                if p * p <= self.limit:
                    mu[p * p:: p * p] = 0
            self._derived["mu"] = mu
        return self._derived["mu"]

    def d_array(self) -> np.ndarray:
        if "d" not in self._derived:
            d = np.zeros(self.limit + 1, dtype=np.int32)
            for i in range(1, math.isqrt(self.limit) + 1):
                d[i * i:: i] += 2
                d[i * i] -= 1
            self._derived["d"] = d
        return self._derived["d"]

    def omega_array(self) -> np.ndarray:
        if "omega" not in self._derived:
            om = np.zeros(self.limit + 1, dtype=np.int8)
            for p in self.primes():
                p = int(p)
                om[p::p] += 1
            self._derived["omega"] = om
        return self._derived["omega"]

    def prime_powers(self, x: int = None) -> Tuple[np.ndarray, np.ndarray]:
        """Prime powers p^k <= x ascending, with their log p weights.

        The weights are produced by math.log on the prime itself, so the
        float multiset is identical no matter which route later re-sums
        it; see the interval module's rigor notes.
        """
        if self._prime_powers is None:
            ns: List[int] = []
            ws: List[float] = []
            for p in self.primes():
                p = int(p)
                w = math.log(p)
                pk = p
                while pk <= self.limit:
                    ns.append(pk)
                    ws.append(w)
                    pk *= p
            order = np.argsort(np.asarray(ns, dtype=np.int64), kind="stable")
            self._prime_powers = (
                np.asarray(ns, dtype=np.int64)[order],
                np.asarray(ws, dtype=np.float64)[order],
            )
        ns, ws = self._prime_powers
        if x is None or x >= self.limit:
            return ns, ws
        cut = np.searchsorted(ns, x, side="right")
        return ns[:cut], ws[:cut]


_REGISTRY: Dict[int, FunctionTables] = {}


def build_tables(limit: int, memory_cap: int = DEFAULT_MEMORY_CAP,
                 cache_dir: Optional[str] = None) -> FunctionTables:
    """Build (or load from cache) the spf tables up to `limit`."""
    if limit < 2:
        raise DomainError("tables limit must be >= 2")
    if limit > memory_cap:
        raise CapacityError(f"limit {limit} exceeds memory cap {memory_cap}")
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV_VAR)
    spf = None
    path = None
    if cache_dir:
        path = _cache_path(cache_dir, limit)
        spf = _load_cache(path, limit)
    if spf is None:
        spf = _build_spf(limit)
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)
            _save_cache(path, limit, spf)
    return FunctionTables(limit, spf)


def get_tables(limit: int, memory_cap: int = DEFAULT_MEMORY_CAP) -> FunctionTables:
    """Process-wide table registry; reuses any table at least as large."""
    for built, tbl in _REGISTRY.items():
        if built >= limit:
            return tbl
    tbl = build_tables(limit, memory_cap=memory_cap)
    _REGISTRY.clear()  # keep only the largest; smaller ones are subsumed
    _REGISTRY[limit] = tbl
    return tbl


# -- module-level arithmetic ops ---------------------------------------

def h2(n: int) -> Fraction:
    """Exact prod over p | n of (1 - p^-2)^-1, without table support."""
    out = Fraction(1)
    for p, _ in factorize_int(n):
        out *= Fraction(p * p, p * p - 1)
    return out


def rough_indicator(n: int, z: int) -> int:
    """g(n) without table support: 1 iff n = 1 or min prime factor > z."""
    if n < 1:
        raise DomainError("rough_indicator needs n >= 1")
    if n == 1:
        return 1
    for p, _ in factorize_int(n):
        return 1 if p > z else 0
    return 1


def sieved_lambda(n: int, z: int) -> float:
    """g(n) * Lambda(n) without table support."""
    if n < 1:
        raise DomainError("sieved_lambda needs n >= 1")
    if n == 1:
        return 0.0
    fac = factorize_int(n)
    if len(fac) != 1:
        return 0.0
    p, _ = fac[0]
    return math.log(p) if p > z else 0.0


def squarefree_count(x: int) -> int:
    """Exact count of squarefree integers <= x via sum mu(m) * floor(x/m^2)."""
    if x < 1:
        raise DomainError("squarefree_count needs x >= 1")
    r = math.isqrt(x)
    mu = np.ones(r + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_up_to(r):
        p = int(p)
        mu[p::p] *= -1
        if p * p <= r:
            mu[p * p:: p * p] = 0
    total = 0
    for m in range(1, r + 1):
        if mu[m]:
            total += int(mu[m]) * (x // (m * m))
    return total


def qm_sum(tables: FunctionTables, m: int, x1: float, x: float) -> float:
    """Sum of mu^2(n)/n over x1 < n <= x with gcd(n, m) = 1."""
    if m < 1:
        raise DomainError("m must be >= 1")
    if x1 < 0 or x < x1:
        raise DomainError("need 0 <= x1 <= x")
    hi = math.floor(x)
    if hi > tables.limit:
        raise CapacityError(f"x={x} beyond table limit {tables.limit}")
    lo = math.floor(x1) + 1
    if lo > hi:
        return 0.0
    ns = np.arange(lo, hi + 1, dtype=np.int64)
    keep = tables.mu_array()[lo: hi + 1] != 0
    if m > 1:
        for p, _ in factorize_int(m):
            keep &= ns % p != 0
    sel = ns[keep]
    return math.fsum((1.0 / ns_i) for ns_i in sel.tolist())

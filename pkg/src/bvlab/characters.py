"""Dirichlet character groups with exact root-of-unity values.

(Z/q)* is decomposed into cyclic factors: one factor per odd
prime-power component (generated by a lifted primitive root), and for
the 2-part either nothing (2^1), the sign factor (2^2), or the pair
<-1> x <5> (2^k, k >= 3).  Discrete logarithms on each factor are
precomputed tables, so evaluating a character costs a few array reads.

Character values are carried as exact angles (Fraction of a full
turn); conversion to complex happens only at sum time, and quarter
angles map to exact +-1/+-i so real characters have exactly real
values.  Conductors come from the factor-exponent valuation formula,
and the test suite cross-checks them against brute-force induction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from .errors import CapacityError, DomainError
from .tables import factorize_int

DEFAULT_CHARACTER_CAP = 10 ** 4


def _primitive_root_mod_p(p: int) -> int:
    if p == 2:
        return 1
    factors = [r for r, _ in factorize_int(p - 1)]
    g = 2
    while True:
        if all(pow(g, (p - 1) // r, p) != 1 for r in factors):
            return g
        g += 1


def _primitive_root_mod_pk(p: int, k: int) -> int:
    g = _primitive_root_mod_p(p)
    if k == 1:
        return g
    # g lifts to p^k unless g^(p-1) = 1 (mod p^2); then g + p works
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True)
class _CyclicFactor:
    """One cyclic factor of (Z/q)* with its discrete-log table."""

    piece: int           # the prime-power component p^k this factor lives in
    p: int
    k: int
    order: int
    dlog: np.ndarray     # index by n mod piece; -1 where not coprime
    kind: str            # "odd", "sign" (mod 4 or the <-1> of 2^k), "five"


def _odd_factor(p: int, k: int) -> _CyclicFactor:
    piece = p ** k
    order = piece // p * (p - 1)
    g = _primitive_root_mod_pk(p, k)
    dlog = np.full(piece, -1, dtype=np.int64)
    val = 1
    for j in range(order):
        dlog[val] = j
        val = val * g % piece
    return _CyclicFactor(piece, p, k, order, dlog, "odd")


def _two_part_factors(k: int) -> List[_CyclicFactor]:
    piece = 1 << k
    if k == 1:
        return []
    if k == 2:
        dlog = np.full(4, -1, dtype=np.int64)
        dlog[1], dlog[3] = 0, 1
        return [_CyclicFactor(4, 2, 2, 2, dlog, "sign")]
    sign = np.full(piece, -1, dtype=np.int64)
    five = np.full(piece, -1, dtype=np.int64)
    for a in (0, 1):
        val = (piece - 1) ** a % piece
        for b in range(piece >> 2):
            sign[val], five[val] = a, b
            val = val * 5 % piece
    return [_CyclicFactor(piece, 2, k, 2, sign, "sign"),
            _CyclicFactor(piece, 2, k, piece >> 2, five, "five")]


def _v_adic(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


_QUARTER_VALUES = {
    Fraction(0): complex(1.0, 0.0),
    Fraction(1, 4): complex(0.0, 1.0),
    Fraction(1, 2): complex(-1.0, 0.0),
    Fraction(3, 4): complex(0.0, -1.0),
}


def _unit(angle: Fraction) -> complex:
    if angle in _QUARTER_VALUES:
        return _QUARTER_VALUES[angle]
    t = 2.0 * math.pi * float(angle)
    return complex(math.cos(t), math.sin(t))


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod q given by its exponents on the cyclic factors."""

    q: int
    exponents: Tuple[int, ...]
    _factors: Tuple[_CyclicFactor, ...] = field(repr=False)
    conductor: int
    _table: list = field(default_factory=lambda: [None], repr=False, compare=False)

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.q

    @property
    def order(self) -> int:
        out = 1
        for e, f in zip(self.exponents, self._factors):
            out = math.lcm(out, f.order // math.gcd(e, f.order))
        return out

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    def angle(self, n: int) -> Optional[Fraction]:
        """Exact angle (fraction of a turn) of chi(n); None when chi(n)=0."""
        if n < 0:
            raise DomainError("character argument must be >= 0")
        if self.q == 1:
            return Fraction(0)
        if math.gcd(n, self.q) != 1:
            return None
        acc = Fraction(0)
        for e, f in zip(self.exponents, self._factors):
            d = int(f.dlog[n % f.piece])
            acc += Fraction(e * d, f.order)
        return acc % 1

    def __call__(self, n: int) -> complex:
        a = self.angle(n)
        return complex(0.0, 0.0) if a is None else _unit(a)

    def value_table(self) -> np.ndarray:
        """chi(n) for n = 0..q-1 as a complex array (cached)."""
        if self._table[0] is None:
            vals = np.zeros(self.q, dtype=np.complex128)
            for n in range(self.q):
                vals[n] = self(n) if self.q > 1 else 1.0
            self._table[0] = vals
        return self._table[0]


def _conductor(q: int, exponents: Tuple[int, ...],
               factors: Tuple[_CyclicFactor, ...]) -> int:
    cond = 1
    two_sign = two_five = None
    two_k = 0
    for e, f in zip(exponents, factors):
        if f.kind == "odd":
            if e:
                v = _v_adic(e, f.p)
                cond *= f.p ** (f.k - min(v, f.k - 1))
        elif f.kind == "sign":
            two_sign, two_k = e, f.k
        else:
            two_five, two_k = e, f.k
    # assemble the 2-part conductor
    if two_k == 2:
        if two_sign:
            cond *= 4
    elif two_k >= 3:
        if two_five:
            cond *= 1 << (two_k - min(_v_adic(two_five, 2), two_k - 3))
        elif two_sign:
            cond *= 4
    return cond


class CharacterGroup:
    """All phi(q) Dirichlet characters mod q, in a fixed enumeration."""

    def __init__(self, q: int, cap: int = DEFAULT_CHARACTER_CAP):
        if q < 1:
            raise DomainError(f"modulus must be >= 1, got {q}")
        if q > cap:
            raise CapacityError(f"modulus {q} beyond character cap {cap}")
        self.q = q
        factors: List[_CyclicFactor] = []
        for p, k in factorize_int(q):
            if p == 2:
                factors.extend(_two_part_factors(k))
            else:
                factors.append(_odd_factor(p, k))
        self.factors = tuple(factors)
        self.order = math.prod(f.order for f in self.factors)
        chars: List[DirichletCharacter] = []
        for idx in range(self.order):
            exps = []
            rem = idx
            for f in self.factors:
                exps.append(rem % f.order)
                rem //= f.order
            exps = tuple(exps)
            chars.append(DirichletCharacter(
                q=q, exponents=exps, _factors=self.factors,
                conductor=_conductor(q, exps, self.factors)))
        self.characters = chars

    def __iter__(self) -> Iterator[DirichletCharacter]:
        return iter(self.characters)

    def __len__(self) -> int:
        return len(self.characters)

    @property
    def principal(self) -> DirichletCharacter:
        return self.characters[0]

    def primitive_characters(self) -> List[DirichletCharacter]:
        return [c for c in self.characters if c.is_primitive]


@lru_cache(maxsize=512)
def character_group(q: int, cap: int = DEFAULT_CHARACTER_CAP) -> CharacterGroup:
    return CharacterGroup(q, cap)


def conductor(chi: DirichletCharacter) -> int:
    """Smallest r dividing q such that chi is induced from modulus r."""
    return chi.conductor

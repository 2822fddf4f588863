"""Progression sums against sympy brute-force oracles.

Where both routes feed the identical float multiset through math.fsum
(which rounds exactly, independent of order), equality is asserted
bitwise; rearranged routes get a 1e-9 relative tolerance.
"""

import math

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from bvlab.characters import character_group
from bvlab.errors import DomainError
from bvlab.progressions import (f_R_decomposition, g_weighted_partial_summation,
                                g_weighted_sums, phi_partial, psi_chi,
                                psi_progression, rough_count)


def lam(n):
    """von Mangoldt via sympy factorization (independent route)."""
    if n < 2:
        return 0.0
    fac = sympy.factorint(n)
    if len(fac) == 1:
        (p, _), = fac.items()
        return math.log(p)
    return 0.0


def brute_psi(x, q, a):
    return math.fsum(lam(n) for n in range(2, math.floor(x) + 1)
                     if n % q == a % q)


# -- psi over progressions -------------------------------------------------

def test_psi_frozen(tables):
    assert psi_progression(10, 1, 1, tables).psi == 7.832014180505469
    r = psi_progression(20, 4, 1, tables)
    assert r.psi == 8.106212902619962
    assert r.discrepancy == 1.893787097380038


@pytest.mark.parametrize("q,a", [(1, 1), (2, 1), (3, 1), (3, 2), (4, 3),
                                 (5, 2), (6, 5)])
def test_psi_vs_brute_exact(tables, q, a):
    for x in (2, 37.5, 100, 500):
        got = psi_progression(x, q, a, tables)
        assert got.psi == brute_psi(x, q, a), (x, q, a)
        assert got.discrepancy == abs(got.psi - x / sympy.totient(q))


def test_psi_chi_principal_exact(tables):
    for q in (3, 8, 12):
        chi0 = character_group(q).principal
        got = psi_chi(500, chi0, tables)
        expect = math.fsum(lam(n) for n in range(2, 501)
                           if math.gcd(n, q) == 1)
        assert got.imag == 0.0
        assert got.real == expect


def test_psi_chi_real_character_is_exactly_real(tables):
    for chi in character_group(12):  # all characters mod 12 are real
        assert psi_chi(1000, chi, tables).imag == 0.0


def test_orthogonality_reconstruction(tables):
    for q in (3, 5, 8, 12):
        group = character_group(q)
        sums = [psi_chi(300, chi, tables) for chi in group]
        for a in range(1, q + 1):
            if math.gcd(a, q) != 1:
                continue
            rebuilt = sum(chi(a).conjugate() * s
                          for chi, s in zip(group, sums)) / len(group)
            direct = psi_progression(300, q, a, tables).psi
            assert abs(rebuilt.imag) < 1e-10
            assert abs(rebuilt.real - direct) < 1e-9 * max(1.0, direct)


def test_unit_classes_partition_coprime_support(tables):
    x, q = 800, 12
    total = sum(psi_progression(x, q, a, tables).psi
                for a in range(1, q) if math.gcd(a, q) == 1)
    expect = math.fsum(lam(n) for n in range(2, x + 1)
                       if math.gcd(n, q) == 1)
    assert abs(total - expect) < 1e-9 * expect


# -- rough-log sums G -------------------------------------------------------

def brute_g(x, q, a, z):
    out = []
    for n in range(2, math.floor(x) + 1):
        if n % q == a % q and min(sympy.factorint(n)) > z:
            out.append(math.log(n))
    return math.fsum(out)


def test_g_frozen(tables):
    r = g_weighted_sums(20, 4, 1, 3, tables)
    assert r.G == 7.007600613951853
    assert r.G1 == -0.1403218935341357


@pytest.mark.parametrize("q,a,z", [(1, 1, 1), (3, 2, 2), (4, 1, 3), (5, 4, 6)])
def test_g_vs_brute(tables, q, a, z):
    for x in (10, 333, 1000):
        got = g_weighted_sums(x, q, a, z, tables)
        brute = brute_g(x, q, a, z)
        assert got.G == brute, (x, q, a, z)  # same multiset through fsum
        # G1 subtracts the unrestricted rough sum over phi(q)
        full = math.fsum(math.log(n) for n in range(2, math.floor(x) + 1)
                         if min(sympy.factorint(n)) > z)
        assert abs(got.G1 - (brute - full / sympy.totient(q))) < 1e-12 * max(
            1.0, abs(got.G1))


def test_partial_summation_identity(tables):
    for (x, q, a, z) in [(1000, 3, 2, 4), (500, 4, 1, 2), (100, 1, 1, 1),
                         (20, 4, 1, 3)]:
        direct = g_weighted_sums(x, q, a, z, tables).G
        stieltjes = g_weighted_partial_summation(x, q, a, z, tables)
        assert abs(stieltjes - direct) <= 1e-9 * max(1.0, abs(direct))


def test_partial_summation_empty_class(tables):
    # no 10-rough numbers = 2 mod 4 below 50 (they would be even)
    assert g_weighted_partial_summation(1, 3, 1, 2, tables) == 0.0


# -- rough counting ----------------------------------------------------------

def brute_rough_count(y, z, q, a):
    n_max = math.floor(y)
    count = 0
    for n in range(1, n_max + 1):
        if n % q != a % q:
            continue
        if n == 1 or min(sympy.factorint(n)) > z:
            count += 1
    return count


@pytest.mark.parametrize("y,z", [(0, 1), (0.5, 1), (1, 1), (10.7, 2),
                                 (100, 5), (250, 7)])
@pytest.mark.parametrize("q,a", [(1, 1), (3, 1), (3, 2), (4, 3)])
def test_rough_count_vs_brute(tables, y, z, q, a):
    assert rough_count(y, z, q, a, tables) == brute_rough_count(y, z, q, a)


def test_phi_partial_values():
    assert phi_partial(6, 2) == 4
    assert phi_partial(30, 1) == 8
    assert phi_partial(30, 30) == 30
    for q in range(1, 200):
        phi = sympy.totient(q)
        for z in (1, 2, 10):
            got = phi_partial(q, z)
            expect = q
            for p in sympy.primefactors(q):
                if p > z:
                    expect = expect // p * (p - 1)
            assert got == expect
            assert got >= phi


# -- conductor-limited remainder ----------------------------------------------

def test_f_r_frozen(tables):
    assert f_R_decomposition(1000, 5, 2, 1, tables=tables) == 22.58889672085808


@pytest.mark.parametrize("q", [5, 12])
def test_f_r_equals_psi_minus_principal_share(tables, q):
    # with R = 1 only the principal character is removed
    x = 1000
    coprime_total = math.fsum(lam(n) for n in range(2, x + 1)
                              if math.gcd(n, q) == 1)
    phi_q = sympy.totient(q)
    for a in range(1, q + 1):
        if math.gcd(a, q) != 1:
            continue
        got = f_R_decomposition(x, q, a, 1, tables=tables)
        expect = brute_psi(x, q, a) - coprime_total / phi_q
        assert abs(got - expect) < 1e-9 * max(1.0, abs(expect))


def test_f_r_class_sum_vanishes(tables):
    for q, r in [(5, 1), (12, 3), (9, 2)]:
        total = sum(f_R_decomposition(1000, q, a, r, tables=tables)
                    for a in range(1, q + 1) if math.gcd(a, q) == 1)
        assert abs(total) < 1e-8


def test_f_r_cutoff_at_or_above_modulus_is_zero(tables):
    assert f_R_decomposition(1000, 5, 2, 5, tables=tables) == 0.0
    assert f_R_decomposition(1000, 5, 2, 7, tables=tables) == 0.0
    assert f_R_decomposition(500, 12, 7, 12, tables=tables) == 0.0


def test_f_r_glog_weight_runs_both_routes(tables):
    v = f_R_decomposition(2000, 7, 3, 2, weight="gLog", tables=tables)
    assert math.isfinite(v)
    with pytest.raises(DomainError):
        f_R_decomposition(2000, 7, 3, 2, weight="mystery", tables=tables)


def test_progression_domain_errors(tables):
    with pytest.raises(DomainError):
        psi_progression(100, 6, 2, tables)  # gcd(2, 6) > 1
    with pytest.raises(DomainError):
        psi_progression(0.5, 3, 1, tables)
    with pytest.raises(DomainError):
        g_weighted_sums(100, 3, 1, 0, tables)
    with pytest.raises(DomainError):
        rough_count(-1, 2, 3, 1, tables)
    with pytest.raises(DomainError):
        f_R_decomposition(100, 5, 2, 0, tables=tables)
    with pytest.raises(DomainError):
        phi_partial(0, 1)


@given(st.integers(min_value=2, max_value=400),
       st.integers(min_value=1, max_value=10))
def test_psi_discrepancy_definition(tables, x, q):
    a = next(b for b in range(1, q + 1) if math.gcd(b, q) == 1)
    r = psi_progression(x, q, a, tables)
    assert r.discrepancy == abs(r.psi - x / sympy.totient(q))
    assert r.psi >= 0.0

"""Inequality sweeps: frozen margins, small-scale brute oracles, probes."""

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from bvlab.bounds import (BoundCheckReport, bilinear_form_probe,
                          check_classical_bounds, check_misc_bounds,
                          check_mu_over_phi, check_squarefree_remainders,
                          dyadic_partition_sums, large_sieve_test,
                          squarefree_remainder_grid)
from bvlab.errors import DomainError
from bvlab.products import euler_product


def assert_report_invariants(report):
    assert isinstance(report, BoundCheckReport)
    assert report.passed == (report.observational or not report.violations)
    assert report.points >= 0
    assert report.runtime_ms is not None and report.runtime_ms >= 0
    for at, lhs, rhs in report.violations:
        assert rhs - lhs < 0  # a recorded violation really is one
        assert rhs - lhs >= report.worst_margin - 1e-12


# -- classical sweep suite ---------------------------------------------------

@pytest.fixture(scope="module")
def classical_1e5(tables):
    return {r.check_id: r for r in check_classical_bounds(10 ** 5,
                                                          tables=tables)}


def test_classical_frozen_margins(classical_1e5):
    expect = {
        "classical_mertens_product": (0.9705764559814662, 2158, 0, False),
        "classical_q_over_phi": (-1.4680682968634833, 99998, 10, True),
        "classical_inv_phi_sum": (1.2907948271492211, 99999, 0, False),
        "classical_mu2n_over_phi2_c4": (-1.8861646676096773, 99999, 64, True),
        "classical_mu2_over_phi2_c5": (1.9435766839936974e-05, 100000, 0,
                                       False),
        "classical_prime_counting": (3.19457679317651, 99999, 0, False),
        "classical_mu2n_over_phi2_intermediate": (0.0, 99999, 0, False),
    }
    assert set(classical_1e5) == set(expect)
    for cid, (worst, points, n_viol, observational) in expect.items():
        r = classical_1e5[cid]
        assert r.worst_margin == worst, cid
        assert r.points == points, cid
        assert len(r.violations) == n_viol, cid
        assert r.observational == observational, cid
        assert r.passed, cid
        assert_report_invariants(r)


def test_prime_counting_brute_oracle(tables):
    r = next(x for x in check_classical_bounds(2000, tables=tables)
             if x.check_id == "classical_prime_counting")
    brute = min(2.0 * x / math.log(x) - sympy.primepi(x)
                for x in range(2, 2001))
    assert abs(r.worst_margin - brute) < 1e-9
    assert not r.violations


def test_inv_phi_brute_oracle(tables):
    r = next(x for x in check_classical_bounds(2000, tables=tables)
             if x.check_id == "classical_inv_phi_sum")
    c2 = euler_product("C2").mid
    s = 1.0  # the q = 1 term of the partial sum
    brute = math.inf
    for x in range(2, 2001):
        s += 1.0 / int(sympy.totient(x))
        brute = min(brute, c2 * (1.0 + math.log(x)) - s)
    assert abs(r.worst_margin - brute) < 1e-8


def test_c5_brute_oracle(tables):
    r = next(x for x in check_classical_bounds(2000, tables=tables)
             if x.check_id == "classical_mu2_over_phi2_c5")
    c5 = euler_product("C5").mid
    # the partial sum increases, so the worst margin sits at x = N
    s = math.fsum(1.0 / sympy.totient(m) ** 2 for m in range(1, 2001)
                  if sympy.mobius(m) != 0)
    assert abs(r.worst_margin - (c5 - s)) < 1e-8
    assert r.worst_margin > 0


def test_q_over_phi_is_observational_below_floor(classical_1e5):
    r = classical_1e5["classical_q_over_phi"]
    assert r.observational and r.passed and r.violations
    assert "below-floor" in r.notes or "stated domain" in r.notes
    # every recorded failure is a genuine exceedance of C3 loglog q
    for q, lhs, rhs in r.violations:
        assert lhs > rhs
        assert lhs == int(q) / int(sympy.totient(int(q)))


def test_mu_over_phi_frozen_and_brute(tables):
    r = check_mu_over_phi(10 ** 5, tables=tables)
    assert r.worst_margin == 9.063892377980665e-06
    assert r.points == 92081
    assert not r.violations and r.passed
    assert_report_invariants(r)
    # brute recomputation at the domain floor
    s = math.fsum(1.0 / sympy.totient(m) for m in range(1, 7921)
                  if sympy.mobius(m) != 0)
    margin_at_floor = 1.334 + math.log(7920) - s
    r2 = check_mu_over_phi(7920, tables=tables)
    assert r2.points == 1
    assert abs(r2.worst_margin - margin_at_floor) < 1e-8
    with pytest.raises(DomainError):
        check_mu_over_phi(7919, tables=tables)


# -- misc sweeps --------------------------------------------------------------

def test_misc_frozen_margins(tables):
    rs = {r.check_id: r for r in check_misc_bounds(10 ** 5, tables=tables)}
    expect = {
        "misc_divisor_bound": (9.459025408622466, 99998),
        "misc_omega_bound": (0.11630265098642312, 99998),
        "misc_sieve_product_bound": (0.0001967651764292061, 315),
        "misc_squarefree_count": (1.6079271018540267, 100000),
    }
    assert set(rs) == set(expect)
    for cid, (worst, points) in expect.items():
        assert rs[cid].worst_margin == worst, cid
        assert rs[cid].points == points, cid
        assert not rs[cid].violations and rs[cid].passed
        assert_report_invariants(rs[cid])


def test_squarefree_count_brute_oracle(tables):
    r = next(x for x in check_misc_bounds(2000, tables=tables)
             if x.check_id == "misc_squarefree_count")
    zeta2 = float(sympy.zeta(2))
    q = 0
    brute = math.inf
    for x in range(1, 2001):
        q += int(sympy.mobius(x) != 0)
        brute = min(brute, 2.0 * math.sqrt(x) - abs(q - x / zeta2))
    assert abs(r.worst_margin - brute) < 1e-9


def test_omega_bound_brute_oracle(tables):
    r = next(x for x in check_misc_bounds(3000, tables=tables)
             if x.check_id == "misc_omega_bound")
    brute = min(1.3841 * math.log(n) / math.log(math.log(n))
                - len(sympy.factorint(n)) for n in range(3, 3001))
    assert abs(r.worst_margin - brute) < 1e-9


# -- squarefree remainder identities -------------------------------------------

def test_remainders_frozen(tables):
    r = check_squarefree_remainders(6, 100, 5000, tables=tables)
    assert r.worst_margin == 2.880929556572673
    assert r.points == 2
    assert not r.violations
    assert "0.000235302" in r.notes and "0.0014094" in r.notes
    assert_report_invariants(r)


def test_remainders_theta_below_one(tables):
    # |theta| <= 1 is the claim under test: margins must stay positive
    for l, x1, x in [(1, 1, 1000), (2, 10, 2000), (30, 50, 5000),
                     (6, 2500, 5000)]:
        r = check_squarefree_remainders(l, x1, float(x), tables=tables)
        assert r.worst_margin > 0, (l, x1, x)
        assert not r.violations


def test_remainder_grid_small(tables):
    reports = squarefree_remainder_grid(tables=tables, ls=(1, 6),
                                        x_max=2000)
    assert len(reports) >= 30
    for r in reports:
        assert r.passed and not r.violations
        assert_report_invariants(r)


def test_remainders_errors(tables):
    with pytest.raises(DomainError):
        check_squarefree_remainders(0, 1, 100, tables=tables)
    with pytest.raises(DomainError):
        check_squarefree_remainders(1, 200, 100, tables=tables)


# -- dyadic partition -----------------------------------------------------------

def brute_dyadic_sums(x_len, y_len, k_max):
    """Re-enumerate every rectangle by explicit integer membership."""
    X, Y = Fraction(x_len), Fraction(y_len)
    sums = [0.0, 0.0, 0.0, 0.0]
    for k in range(1, k_max + 1):
        pow2 = 1 << k
        for j in range(1 << (k - 1)):
            m_lo = (1 + Fraction(2 * j, pow2)) * X
            m_hi = min(1 + Fraction(2 * j + 1, pow2), Fraction(2)) * X
            n_lo = Y / (1 + Fraction(2 * j + 2, pow2))
            n_hi = Y / (1 + Fraction(2 * j + 1, pow2))
            m = float(sum(1 for v in range(1, 2 * x_len + 1)
                          if m_lo < v <= m_hi))
            n = float(sum(1 for v in range(1, 2 * y_len + 1)
                          if n_lo < v <= n_hi))
            sums[0] += math.sqrt(m * n)
            sums[1] += m * math.sqrt(n)
            sums[2] += math.sqrt(m) * n
            sums[3] += m * n
    return dict(zip(("sum_sqrtMN", "sum_MsqrtN", "sum_sqrtMN2", "sum_MN"),
                    sums))


@pytest.mark.parametrize("x_len,y_len,k_max", [(4, 4, 1), (16, 16, 3),
                                               (16, 32, 4), (7, 11, 2)])
def test_dyadic_counts_vs_bruteforce(x_len, y_len, k_max):
    sums, report = dyadic_partition_sums(x_len, y_len, k_max)
    brute = brute_dyadic_sums(x_len, y_len, k_max)
    assert sums == brute  # identical accumulation order: bitwise equal
    assert report.points == sum(1 << (k - 1) for k in range(1, k_max + 1))
    assert_report_invariants(report)


def test_dyadic_frozen():
    sums, report = dyadic_partition_sums(4, 4, 1)
    assert sums == {"sum_sqrtMN": 0.0, "sum_MsqrtN": 0.0,
                    "sum_sqrtMN2": 0.0, "sum_MN": 0.0}
    assert report.worst_margin == 20.0 and report.points == 1
    sums, report = dyadic_partition_sums(1024, 1024, 8)
    assert report.worst_margin == 12054.058427913857
    assert report.points == 255
    assert report.passed and not report.violations


def test_dyadic_errors():
    with pytest.raises(DomainError):
        dyadic_partition_sums(1, 4, 1)
    with pytest.raises(DomainError):
        dyadic_partition_sums(4, 4, 0)
    with pytest.raises(DomainError):
        dyadic_partition_sums(4, 4, 21)


# -- large sieve -----------------------------------------------------------------

def test_large_sieve_frozen():
    r = large_sieve_test(30, 2000, 20, seed=12345)
    assert r.worst_margin == 2676794.34983668
    assert r.points == 20
    assert not r.violations and r.passed
    assert_report_invariants(r)


def test_large_sieve_q1_hand_case():
    # only the trivial character: lhs = |sum a_n|^2, rhs = (N+1)*energy
    seed, n_max, trials = 777, 50, 3
    rng = np.random.default_rng(seed)
    margins = []
    for _ in range(trials):
        radius = np.sqrt(rng.random(n_max))
        angle = 2.0 * np.pi * rng.random(n_max)
        a = radius * np.exp(1j * angle)
        lhs = abs(np.sum(a)) ** 2
        rhs = (n_max + 1) * float(np.sum(np.abs(a) ** 2))
        margins.append(rhs - lhs)
    r = large_sieve_test(1, n_max, trials, seed)
    assert abs(r.worst_margin - min(margins)) < 1e-9 * max(1.0, min(margins))
    assert not r.violations


def test_large_sieve_seed_reproducible():
    a = large_sieve_test(10, 200, 5, seed=42)
    b = large_sieve_test(10, 200, 5, seed=42)
    c = large_sieve_test(10, 200, 5, seed=43)
    assert a.worst_margin == b.worst_margin
    assert a.worst_margin != c.worst_margin


def test_large_sieve_errors():
    for bad in [(0, 10, 1), (10, 0, 1), (10, 10, 0)]:
        with pytest.raises(DomainError):
            large_sieve_test(*bad, seed=1)


# -- bilinear probe ----------------------------------------------------------------

def test_bilinear_probe_frozen_unit_coeffs():
    r = bilinear_form_probe(20, 3, 64, 64, seed=None)
    assert r.observational and r.passed
    assert "lhs=188.99999999999991" in r.notes
    assert "rhs_statement=409945.4926893933" in r.notes
    assert "rhs_proof_end=345072.0299762014" in r.notes
    assert_report_invariants(r)


def test_bilinear_probe_cutoff_above_modulus_is_empty():
    r = bilinear_form_probe(5, 6, 16, 16, seed=None)
    assert r.points == 0
    assert "lhs=0.0" in r.notes


def test_bilinear_probe_explicit_coeffs_and_errors():
    a = np.ones(8, dtype=np.complex128)
    b = np.ones(8, dtype=np.complex128)
    r = bilinear_form_probe(6, 2, 8, 8, a_coeffs=a, b_coeffs=b)
    assert r.points > 0
    with pytest.raises(DomainError):
        bilinear_form_probe(2, 1, 8, 8)
    with pytest.raises(DomainError):
        bilinear_form_probe(6, 2, 8, 8, a_coeffs=np.ones(3, dtype=complex))


def test_classical_errors(tables):
    with pytest.raises(DomainError):
        check_classical_bounds(5, tables=tables)
    with pytest.raises(DomainError):
        check_classical_bounds(100, q0=0, tables=tables)

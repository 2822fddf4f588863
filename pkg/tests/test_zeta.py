"""Zeta and prime-zeta enclosures against high-precision oracles."""

from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bvlab.errors import DomainError
from bvlab.zeta import prime_zeta, rational_power, zeta_value

mp.mp.dps = 50


@pytest.fixture(autouse=True)
def _pin_precision():
    # mp.dps is process-global and other test modules set their own
    # working precision, so re-pin it for every test here
    mp.mp.dps = 50
    yield


def assert_contains_mp(v, truth, max_width=1e-12):
    assert mp.mpf(v.lo) <= truth <= mp.mpf(v.hi), (v, truth)
    assert v.width <= max_width


@pytest.mark.parametrize("s", [2, 3, 4, 5, 6, 7, 8,
                               Fraction(3, 2), Fraction(5, 2),
                               Fraction(7, 2), Fraction(17, 2)])
def test_zeta_value_vs_mpmath(s):
    truth = mp.zeta(mp.mpf(s.numerator) / s.denominator
                    if isinstance(s, Fraction) else s)
    assert_contains_mp(zeta_value(s), truth)


def test_zeta_frozen_endpoints():
    v = zeta_value(Fraction(3, 2))
    assert (v.lo, v.hi) == (2.6123753486854846, 2.6123753486854926)
    v = zeta_value(3)
    assert (v.lo, v.hi) == (1.2020569031595931, 1.202056903159596)
    v = zeta_value(2)
    assert (v.lo, v.hi) == (1.6449340668482255, 1.644934066848228)
    v = zeta_value(6)
    assert (v.lo, v.hi) == (1.0173430619844475, 1.0173430619844521)


def test_zeta_domain_errors():
    for bad in (1, 0, -2, Fraction(1, 2), Fraction(2, 2)):
        with pytest.raises(DomainError):
            zeta_value(bad)
    with pytest.raises(DomainError):
        zeta_value(Fraction(5, 4))  # only integer/half-integer s


@pytest.mark.parametrize("s", [Fraction(3, 2), 2, Fraction(5, 2), 3,
                               Fraction(17, 2)])
def test_prime_zeta_vs_mpmath(s):
    x = mp.mpf(s.numerator) / s.denominator if isinstance(s, Fraction) else s
    assert_contains_mp(prime_zeta(s), mp.primezeta(x), max_width=1e-12)


def test_prime_zeta_frozen_endpoints():
    v = prime_zeta(Fraction(3, 2))
    assert (v.lo, v.hi) == (0.8495626836215318, 0.8495626836215991)
    v = prime_zeta(2)
    assert (v.lo, v.hi) == (0.4522474200410473, 0.4522474200410836)


def test_prime_zeta_domain():
    with pytest.raises(DomainError):
        prime_zeta(1)
    with pytest.raises(DomainError):
        prime_zeta(Fraction(4, 3))


def test_rational_power_exact_cases():
    v = rational_power(4, Fraction(3, 2))
    assert Fraction(v.lo) <= 8 <= Fraction(v.hi)
    assert v.width <= 1e-13
    v = rational_power(9, Fraction(1, 2))
    assert Fraction(v.lo) <= 3 <= Fraction(v.hi)


@given(st.integers(min_value=2, max_value=10 ** 6),
       st.integers(min_value=1, max_value=17))
def test_rational_power_containment(n, k):
    s = Fraction(k, 2)
    v = rational_power(n, s)
    # v should contain n^(k/2): compare v^2 against n^k exactly
    exact = Fraction(n) ** k
    assert Fraction(v.lo) ** 2 <= exact <= Fraction(v.hi) ** 2


def test_half_integer_consistency():
    # zeta(s) for half-integer s is monotone decreasing in s
    vals = [zeta_value(Fraction(k, 2)) for k in range(3, 18)]
    for a, b in zip(vals, vals[1:]):
        assert a.lo > b.hi - 1e-12

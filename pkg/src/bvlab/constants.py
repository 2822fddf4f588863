"""Constant catalog: frozen fixtures, closed-form scalars, thresholds.

Sources of values, in decreasing order of computation:

* Euler products (C2, C5, B1/B2(l), B3, B4, B5) and zeta values are
  recomputed rigorously by the products and zeta modules;
* closed-form scalars (C3, C4, C13) are assembled here from their
  defining expressions in interval arithmetic;
* tabulated bounds (C6, C7, C9, C1, C12, C1p, the threshold exponents
  T and split exponents alpha1) and literal constants (gamma, R0, R1,
  Q0, C11) are loaded from data/constants.txt and never recomputed.

theorem_coefficient assembles the final bound coefficient
(C6+C7+C8)/loglog x + {C9 or C12} + C10 + (A+3)(C0+e^-100)*{C2^2 or
C13}; implied_threshold inverts the bracketed inequality for the
smallest admissible loglog x.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Dict, List, Optional, Tuple

from .errors import DomainError
from .interval import RigorousValue, exp_bound_interval
from .products import DEFAULT_CUTOFF, euler_product
from .zeta import zeta_value

DEFAULT_Q0 = 223092871  # smallest integer admissible for C3/C4
Q0_FLOOR = 223092870
VARIANTS = ("all_moduli", "squarefree_moduli")


@dataclass(frozen=True)
class ConstantCatalogEntry:
    id: str
    params: Dict[str, int]
    value: RigorousValue
    note: str

    @property
    def display_id(self) -> str:
        if not self.params:
            return self.id
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.id}[{inner}]"


def _parse_params(field: str) -> Dict[str, int]:
    field = field.strip()
    if field == "-":
        return {}
    out = {}
    for piece in field.split(","):
        key, _, val = piece.partition("=")
        out[key.strip()] = int(val)
    return out


def _load_catalog() -> List[ConstantCatalogEntry]:
    text = resources.files("bvlab").joinpath("data/constants.txt").read_text()
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        id_, params, lo, hi, note = [f.strip() for f in line.split("|")]
        value = RigorousValue.from_decimal(lo, None if hi == "=" else hi)
        entries.append(ConstantCatalogEntry(id_, _parse_params(params), value, note))
    return entries


_CATALOG: List[ConstantCatalogEntry] = _load_catalog()
_BY_KEY: Dict[Tuple[str, Tuple[Tuple[str, int], ...]], ConstantCatalogEntry] = {
    (e.id, tuple(sorted(e.params.items()))): e for e in _CATALOG
}
TABLE_A_RANGE = tuple(range(2, 8))


def catalog_entries() -> List[ConstantCatalogEntry]:
    return list(_CATALOG)


def fixture(id_: str, **params: int) -> RigorousValue:
    """Fixture lookup, e.g. fixture("C6", A=2) or fixture("R0")."""
    key = (id_, tuple(sorted(params.items())))
    if key not in _BY_KEY:
        raise DomainError(f"no catalog fixture {id_!r} with params {params}")
    return _BY_KEY[key].value


def gamma_value() -> RigorousValue:
    return fixture("gamma")


def _require_a(a: int) -> int:
    if a not in TABLE_A_RANGE:
        raise DomainError(f"A must be in [2, 7], got {a}")
    return a


def scalar_constant(id_: str, params: Optional[Dict[str, float]] = None,
                    cutoff: int = DEFAULT_CUTOFF) -> RigorousValue:
    """Closed-form catalog scalars: C3, C4, C13 (plus literal fixtures).

    C3 and C4 need params["Q0"] > 223092870 (default 223092871);
    C13 needs params["A"] in [2,7] and params["loglog_x0"] > 0.
    """
    params = dict(params or {})
    if id_ == "C3":
        q0 = int(params.pop("Q0", DEFAULT_Q0))
        if q0 <= Q0_FLOOR:
            raise DomainError(f"C3 needs a constant greater than {Q0_FLOOR}")
        loglog = RigorousValue.exact(q0).log().log()
        return gamma_value().exp() + RigorousValue.exact(5) / (2 * loglog)
    if id_ == "C4":
        q0 = int(params.pop("Q0", DEFAULT_Q0))
        if q0 <= Q0_FLOOR:
            raise DomainError(f"C4 needs a constant greater than {Q0_FLOOR}")
        c2 = euler_product("C2", cutoff)
        num = RigorousValue.exact(Fraction(89, 16)) - c2 * RigorousValue.exact(6).log()
        return c2 + num / RigorousValue.exact(q0).log()
    if id_ == "C13":
        a = _require_a(int(params.pop("A")))
        loglog_x0 = params.pop("loglog_x0")
        if loglog_x0 <= 0:
            raise DomainError("C13 needs loglog_x0 > 0")
        denom = RigorousValue.exact(a + 3) * RigorousValue.exact(loglog_x0)
        return 1 + RigorousValue.from_decimal("1.334") / denom
    key = (id_, tuple(sorted((k, int(v)) for k, v in params.items())))
    if key in _BY_KEY:
        return _BY_KEY[key].value
    raise DomainError(f"unknown scalar constant {id_!r}")


_ZETA_RE = re.compile(r"^zeta\((\d+(?:/\d+)?)\)$")


def value_of(id_: str, cutoff: int = DEFAULT_CUTOFF,
             params: Optional[Dict[str, float]] = None) -> RigorousValue:
    """Resolve any catalog id to an enclosure (products, zetas, scalars)."""
    m = _ZETA_RE.match(id_)
    if m:
        return zeta_value(Fraction(m.group(1)))
    if id_ in ("C2", "C5", "B3", "B4", "B5") or re.match(r"^B[12]\(\d+\)$", id_):
        return euler_product(id_, cutoff)
    if id_ in ("C3", "C4", "C13"):
        return scalar_constant(id_, params, cutoff)
    return scalar_constant(id_, params, cutoff)


def theorem_coefficient(a: int, loglogx: float, c0: float,
                        variant: str = "all_moduli",
                        cutoff: int = DEFAULT_CUTOFF) -> RigorousValue:
    """Coefficient of x(loglog x)^2/(2 log^A x) in the assembled bound.

    variant "all_moduli" uses the constant term C9 and the factor C2^2;
    variant "squarefree_moduli" uses C12 and the factor C13(A, loglogx).
    C8 and C10 enter as the enclosure [0, e^-2000] they are bounded by.
    """
    a = _require_a(a)
    if loglogx <= 0:
        raise DomainError("theorem_coefficient needs loglog x > 0")
    if c0 < 0:
        raise DomainError("theorem_coefficient needs C0 >= 0")
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}")
    tiny = exp_bound_interval(-2000)
    c6 = fixture("C6", A=a)
    c7 = fixture("C7", A=a)
    ll = RigorousValue.exact(loglogx)
    head = (c6 + c7 + tiny) / ll
    sieve_scale = RigorousValue.exact(a + 3) * (
        RigorousValue.exact(c0) + exp_bound_interval(-100))
    if variant == "all_moduli":
        const = fixture("C9", A=a)
        factor = euler_product("C2", cutoff).pow_int(2)
    else:
        const = fixture("C12", A=a)
        factor = scalar_constant("C13", {"A": a, "loglog_x0": loglogx})
    return head + const + tiny + sieve_scale * factor


def implied_threshold(a: int, variant: str = "all_moduli") -> float:
    """Smallest loglog x with (C6+C7+C8)/loglogx + const + C10 <= total.

    Returns the upper endpoint of the rigorous enclosure of
    (C6+C7+C8)/(total - const - C10), so the inequality is certified
    for every loglog x at or above the returned value.
    """
    a = _require_a(a)
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}")
    tiny = exp_bound_interval(-2000)
    c6 = fixture("C6", A=a)
    c7 = fixture("C7", A=a)
    if variant == "all_moduli":
        const, total = fixture("C9", A=a), fixture("C1", A=a)
    else:
        const, total = fixture("C12", A=a), fixture("C1p", A=a)
    denom = total - const - tiny
    if not denom.certainly_positive():
        raise DomainError(f"no positive threshold for A={a}, variant={variant}")
    return ((c6 + c7 + tiny) / denom).hi


def exceptional_terms(x: float, beta0: float) -> Dict[str, RigorousValue]:
    """Exceptional-zero contributions, evaluated as written.

    siegel_term is x^(-beta0)/(1-beta0) + x^(beta0-1)/beta0 literally;
    because the first summand decays in x it may be a slip for
    x^(+beta0), so the positive-exponent variant is reported alongside
    without being asserted.  liu_wang_exponent is the explicit
    zero-free-region exponent -4*pi/(9*0.4923*log^(1/4)x*(loglog x)^2).
    """
    if not (0.0 < beta0 < 1.0):
        raise DomainError("beta0 must lie in (0, 1)")
    if x <= 2.718281828459045:
        raise DomainError("x must exceed e")
    xe = RigorousValue.exact(x)
    logx = xe.log()
    b = RigorousValue.exact(beta0)
    one_minus = RigorousValue.exact(1) - b
    x_pow_minus = (-(b * logx)).exp()
    x_pow_bm1 = ((b - 1) * logx).exp()
    x_pow_plus = (b * logx).exp()
    siegel = x_pow_minus / one_minus + x_pow_bm1 / b
    siegel_variant = x_pow_plus / one_minus + x_pow_bm1 / b
    from .interval import PI
    loglogx = logx.log()
    quarter_log = logx.sqrt().sqrt()
    denom = RigorousValue.from_decimal("0.4923") * 9 * quarter_log * loglogx.pow_int(2)
    lw_exp = -(4 * PI) / denom
    return {
        "siegel_term": siegel,
        "siegel_term_positive_exponent_variant": siegel_variant,
        "liu_wang_exponent": lw_exp,
    }

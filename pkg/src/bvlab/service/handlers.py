"""Transport-free handlers: request model in, response model out.

Each handler wraps one workbench operation.  The CLI calls these directly
(in-process); the FastAPI app in `bvlab.service.app` exposes the same
functions over HTTP.  Domain and capacity failures propagate as the
package exceptions; transport layers map them to their own error shapes.
"""

from __future__ import annotations

import re
from typing import Any, Dict, List, Optional, Tuple

from ..bounds import (
    MU_PHI_THRESHOLD,
    check_classical_bounds,
    check_misc_bounds,
    check_mu_over_phi,
    check_squarefree_remainders,
    dyadic_partition_sums,
    large_sieve_test,
    bilinear_form_probe,
    squarefree_remainder_grid,
)
from ..characters import character_group
from ..constants import DEFAULT_Q0, catalog_entries, value_of
from ..errors import DomainError
from ..harness import (
    bv_discrepancy_sum,
    convolution_identity_check,
    trend_report,
    truncation_estimate_check,
)
from ..progressions import ProgressionSums, f_R_decomposition, psi_progression
from ..reports import bv_result_to_dict, report_to_dict
from ..tables import get_tables
from .. import __version__
from . import schemas

__all__ = [
    "COMPUTED_CONSTANT_IDS",
    "VERIFY_CHECK_IDS",
    "constants_handler",
    "verify_handler",
    "bv_handler",
    "psi_handler",
    "chars_handler",
    "trend_handler",
    "probe_handler",
    "health_handler",
    "valid_constant_ids",
]

# Ids recomputed from scratch with interval arithmetic (as opposed to the
# tabulated fixtures, which are frozen literals from the catalog file).
COMPUTED_CONSTANT_IDS: Tuple[str, ...] = (
    "C2", "C5", "B3", "B4", "B5", "C3", "C4",
    "zeta(3/2)", "zeta(2)", "zeta(3)", "zeta(6)",
)

_PARAMETRIC_RE = re.compile(r"^B[12]\(\d+\)$|^zeta\(\d+(?:/\d+)?\)$")
_FIXTURE_RE = re.compile(r"^(\w+)\[([^\]]*)\]$")

VERIFY_CHECK_IDS: Tuple[str, ...] = (
    "classical", "mu_over_phi", "remainders", "misc",
    "partition", "large_sieve", "convolution", "truncation",
)


def valid_constant_ids() -> List[str]:
    """Every id the constants operation accepts (fixtures rendered with
    their parameters, e.g. T[A=2])."""
    ids = list(COMPUTED_CONSTANT_IDS) + ["B1(l)", "B2(l)", "zeta(s)"]
    ids.extend(entry.display_id for entry in catalog_entries())
    return ids


def _fixture_lookup() -> Dict[str, Any]:
    return {entry.display_id: entry for entry in catalog_entries()}


def _constant_entry(id_: str, cutoff: int,
                    precision_target: float) -> schemas.ConstantEntryModel:
    fixtures = _fixture_lookup()
    if id_ in fixtures:
        entry = fixtures[id_]
        v = entry.value
        return schemas.ConstantEntryModel(
            id=id_,
            value=schemas.EnclosureModel(lo=v.lo, hi=v.hi, mid=v.mid,
                                         width=v.width),
            cutoff=None,
            meets_precision_target=None,
            note=entry.note,
        )
    m = _FIXTURE_RE.match(id_)
    if m and not _PARAMETRIC_RE.match(id_):
        raise DomainError(
            f"unknown constant id {id_!r}; valid ids: "
            + ", ".join(valid_constant_ids()))
    if id_ in COMPUTED_CONSTANT_IDS or _PARAMETRIC_RE.match(id_):
        v = value_of(id_, cutoff=cutoff)
        note = ("recomputed enclosure"
                + ("" if id_.startswith(("zeta", "C3")) else
                   f", Euler factors to {cutoff}"))
        return schemas.ConstantEntryModel(
            id=id_,
            value=schemas.EnclosureModel(lo=v.lo, hi=v.hi, mid=v.mid,
                                         width=v.width),
            cutoff=None if id_.startswith("zeta") else cutoff,
            meets_precision_target=bool(v.width <= precision_target),
            note=note,
        )
    raise DomainError(
        f"unknown constant id {id_!r}; valid ids: "
        + ", ".join(valid_constant_ids()))


def constants_handler(req: schemas.ConstantsRequest) -> schemas.ConstantsResponse:
    ids = list(req.ids)
    if ids == ["all"] or ids == []:
        ids = list(COMPUTED_CONSTANT_IDS) + ["B1(1)", "B2(1)"]
        ids += sorted(_fixture_lookup())
    entries = [_constant_entry(i, req.cutoff, req.precision_target)
               for i in ids]
    return schemas.ConstantsResponse(entries=entries)


def _report_model(report) -> schemas.ReportModel:
    return schemas.ReportModel(**report_to_dict(report))


def verify_handler(req: schemas.VerifyRequest) -> schemas.VerifyResponse:
    checks = list(req.checks)
    if checks == ["suite"] or checks == []:
        checks = list(VERIFY_CHECK_IDS)
    unknown = [c for c in checks if c not in VERIFY_CHECK_IDS]
    if unknown:
        raise DomainError(
            f"unknown check id(s) {unknown}; valid ids: "
            + ", ".join(VERIFY_CHECK_IDS) + ", suite")

    n = int(req.n)
    q0 = int(req.q0) if req.q0 is not None else DEFAULT_Q0
    needs_tables = set(checks) & {"classical", "mu_over_phi", "remainders",
                                  "misc", "convolution", "truncation"}
    tables = get_tables(max(n, 10 ** 4)) if needs_tables else None

    reports = []
    partition_sums: Optional[Dict[str, float]] = None
    for check in checks:
        if check == "classical":
            reports.extend(check_classical_bounds(n, q0=q0, tables=tables,
                                              workers=req.workers))
        elif check == "mu_over_phi":
            if n < MU_PHI_THRESHOLD:
                raise DomainError(
                    f"mu_over_phi needs N >= {MU_PHI_THRESHOLD}, got {n}")
            reports.append(check_mu_over_phi(n, tables=tables,
                                             workers=req.workers))
        elif check == "remainders":
            if req.modulus is not None:
                x = req.x if req.x is not None else float(min(n, 10 ** 5))
                x1 = req.x1 if req.x1 is not None else max(1.0, x ** 0.5)
                reports.append(check_squarefree_remainders(
                    int(req.modulus), x1, x, tables=tables))
            else:
                reports.extend(squarefree_remainder_grid(
                    tables=tables, x_max=min(n, 10 ** 5)))
        elif check == "misc":
            reports.extend(check_misc_bounds(n, tables=tables,
                                             workers=req.workers))
        elif check == "partition":
            sums, rep = dyadic_partition_sums(req.x_len, req.y_len, req.k_max)
            partition_sums = {k: float(v) for k, v in sums.items()}
            reports.append(rep)
        elif check == "large_sieve":
            reports.append(large_sieve_test(
                req.q_max, req.coeff_len, req.trials, req.seed,
                workers=req.workers))
        elif check == "convolution":
            reports.append(convolution_identity_check(
                min(n, 10 ** 4), req.r_cut, tables=tables))
        elif check == "truncation":
            reports.append(truncation_estimate_check(
                min(n, 10 ** 5), req.r_cut, tables=tables))
    ok = all(r.passed for r in reports)
    return schemas.VerifyResponse(
        ok=ok,
        reports=[_report_model(r) for r in reports],
        partition_sums=partition_sums,
    )


def bv_handler(req: schemas.BVRequest) -> schemas.BVResponse:
    result = bv_discrepancy_sum(
        req.x, req.q_max,
        squarefree_only=req.squarefree_only,
        exclude_q0=req.exclude_q0,
        y_mode=req.y_mode,
        a_param=req.a_param,
        workers=req.workers,
    )
    return schemas.BVResponse(**bv_result_to_dict(result))


def psi_handler(req: schemas.PsiRequest) -> schemas.PsiResponse:
    sums: ProgressionSums = psi_progression(req.x, req.q, req.a)
    f_r = None
    if req.r_cut is not None:
        f_r = f_R_decomposition(req.x, req.q, req.a, req.r_cut,
                                weight=req.weight)
    from ..progressions import _phi_exact
    phi_q = _phi_exact(req.q)
    return schemas.PsiResponse(
        x=req.x, q=req.q, a=req.a, phi_q=phi_q,
        psi=sums.psi,
        expected=req.x / phi_q,
        discrepancy=sums.discrepancy,
        f_R=f_r,
        r_cut=req.r_cut,
    )


def chars_handler(req: schemas.CharsRequest) -> schemas.CharsResponse:
    group = character_group(req.q, cap=req.character_cap)
    chars = []
    primitive = 0
    for idx, chi in enumerate(group.characters):
        if chi.is_primitive:
            primitive += 1
        chars.append(schemas.CharacterModel(
            index=idx,
            exponents=list(chi.exponents),
            conductor=chi.conductor,
            order=chi.order,
            is_principal=chi.is_principal,
            is_primitive=chi.is_primitive,
            is_real=chi.is_real,
        ))
    return schemas.CharsResponse(
        q=req.q, count=len(chars), primitive_count=primitive,
        characters=chars)


_TREND_NOTE = (
    "qualitative trend only: the proven regime starts far beyond "
    "floating-point range, so desk-scale rows cannot confirm or refute "
    "the asymptotic statement"
)


def trend_handler(req: schemas.TrendRequest) -> schemas.TrendResponse:
    rows = trend_report(req.x_list, req.a_param,
                        q_override=req.q_override,
                        squarefree_only=req.squarefree_only,
                        workers=req.workers)
    return schemas.TrendResponse(
        a_param=req.a_param,
        squarefree_only=req.squarefree_only,
        note=_TREND_NOTE,
        rows=[schemas.TrendRowModel(**row) for row in rows],
    )


def probe_handler(req: schemas.ProbeRequest) -> schemas.ProbeResponse:
    report = bilinear_form_probe(
        req.q_max, req.r_min, req.m_len, req.n_len,
        seed=req.seed, a_param=req.a_param)
    return schemas.ProbeResponse(report=_report_model(report))


def health_handler() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=__version__)

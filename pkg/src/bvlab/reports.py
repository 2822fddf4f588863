"""Canonical JSON/CSV serialization for check reports and harness results.

Two invariants drive the design:

* **Byte reproducibility.**  Serializing the same result twice — or results
  produced with different worker counts — must yield identical bytes.  Wall
  times are therefore excluded by default (``runtime_ms`` serializes as
  ``null`` unless explicitly requested), keys appear in a fixed order, and
  all float formatting is deterministic.
* **Display precision.**  Scalar results (sums, margins, discrepancies) are
  rounded to 10 significant digits for output.  Enclosure *endpoints* are the
  one exception: rounding a lower/upper bound to nearest could move it across
  the true value and falsify the containment claim, so ``lo``/``hi`` fields
  keep full precision.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Mapping, Sequence

from .bounds import BoundCheckReport
from .harness import BVSumResult
from .interval import RigorousValue

__all__ = [
    "format_real",
    "round_reals",
    "report_to_dict",
    "reports_to_dicts",
    "bv_result_to_dict",
    "enclosure_to_dict",
    "to_canonical_json",
    "report_dicts_to_csv",
    "reports_to_csv",
    "bv_dict_to_csv",
    "bv_result_to_csv",
    "rows_to_csv",
]

SIGNIFICANT_DIGITS = 10

# Keys whose values are rigorous interval endpoints; these keep full
# precision so the serialized interval still contains the true value.
_EXACT_KEYS = frozenset({"lo", "hi"})


def format_real(value: float, digits: int = SIGNIFICANT_DIGITS) -> str:
    """Format a float with the given number of significant digits."""
    if value != value:  # NaN
        return "nan"
    if value in (math.inf, -math.inf):
        return "inf" if value > 0 else "-inf"
    return f"{float(value):.{digits}g}"


def _round_real(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """Round a float to `digits` significant digits, deterministically."""
    if value != value or value in (math.inf, -math.inf):
        return value
    return float(f"{float(value):.{digits}g}")


def round_reals(obj: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Recursively round every float in a JSON-ish structure.

    Values stored under interval-endpoint keys (``lo``/``hi``) are kept at
    full precision; see module docstring.
    """
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return _round_real(obj, digits)
    if isinstance(obj, Mapping):
        return {
            k: (v if (k in _EXACT_KEYS and isinstance(v, float))
                else round_reals(v, digits))
            for k, v in obj.items()
        }
    if isinstance(obj, (list, tuple)):
        return [round_reals(v, digits) for v in obj]
    return obj


# -- report serialization ----------------------------------------------

def _norm_point(at: Any) -> Any:
    if isinstance(at, tuple):
        return list(at)
    if hasattr(at, "item"):  # numpy scalar
        return at.item()
    return at


def _violation_to_dict(v: Any) -> dict:
    """Violations are (at, lhs, rhs) triples; `at` may be an int, a pair,
    or a label naming which of several envelopes failed."""
    if isinstance(v, Mapping):
        return {str(k): v[k] for k in v}
    at, lhs, rhs = v
    return {"at": _norm_point(at), "lhs": float(lhs), "rhs": float(rhs)}


def report_to_dict(report: BoundCheckReport,
                   include_runtime: bool = False) -> dict:
    """Serialize one check report (fixed key order)."""
    out = {
        "check_id": report.check_id,
        "params": dict(report.params),
        "domain": str(report.domain),
        "points": int(report.points),
        "worst_margin": float(report.worst_margin),
        "violations": [_violation_to_dict(v) for v in report.violations],
        "runtime_ms": (float(report.runtime_ms)
                       if include_runtime and report.runtime_ms is not None
                       else None),
        "observational": bool(report.observational),
        "passed": bool(report.passed),
    }
    if report.notes:
        out["notes"] = report.notes
    return out


def reports_to_dicts(reports: Iterable[BoundCheckReport],
                     include_runtime: bool = False) -> list:
    return [report_to_dict(r, include_runtime=include_runtime)
            for r in reports]


def bv_result_to_dict(result: BVSumResult) -> dict:
    """Serialize a discrepancy-sum result (fixed key order)."""
    return {
        "x": float(result.x),
        "Q": int(result.q_max),
        "mode": result.mode,
        "squarefree_only": bool(result.squarefree_only),
        "exclude_q0": (int(result.excluded_modulus)
                       if result.excluded_modulus is not None else None),
        "total": float(result.total),
        "normalized": float(result.normalized),
        "a_param": int(result.a_param),
        "records": [
            {
                "q": int(rec.q),
                "a_star": int(rec.a_star),
                "discrepancy": float(rec.discrepancy),
                "flags": {
                    "squarefree": bool(rec.squarefree),
                    "excluded": bool(rec.excluded),
                },
            }
            for rec in result.records
        ],
    }


def enclosure_to_dict(value: RigorousValue) -> dict:
    """Serialize an interval enclosure; endpoints keep full precision."""
    return {
        "lo": float(value.lo),
        "hi": float(value.hi),
        "mid": float(value.mid),
        "width": float(value.width),
    }


# -- canonical writers ---------------------------------------------------

def to_canonical_json(payload: Any, digits: int = SIGNIFICANT_DIGITS) -> str:
    """Deterministic JSON: rounded reals, fixed separators, trailing newline."""
    rounded = round_reals(payload, digits)
    return json.dumps(rounded, indent=2, allow_nan=False,
                      ensure_ascii=True) + "\n"


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_real(value)
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, allow_nan=False, ensure_ascii=True)
    return str(value)


def rows_to_csv(header: Sequence[str],
                rows: Iterable[Sequence[Any]]) -> str:
    """Deterministic CSV with Unix line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([_csv_cell(cell) for cell in row])
    return buf.getvalue()


REPORT_CSV_HEADER = ["check_id", "params", "domain", "points",
                     "worst_margin", "violations", "runtime_ms",
                     "observational", "passed", "notes"]


def report_dicts_to_csv(dicts: Iterable[Mapping[str, Any]]) -> str:
    """One CSV row per serialized check report."""
    rows = []
    for d in dicts:
        rows.append([
            d["check_id"],
            round_reals(d["params"]),
            d["domain"],
            d["points"],
            _round_real(d["worst_margin"]),
            round_reals(d["violations"]),
            d.get("runtime_ms"),
            d["observational"],
            d["passed"],
            d.get("notes") or "",
        ])
    return rows_to_csv(REPORT_CSV_HEADER, rows)


def reports_to_csv(reports: Iterable[BoundCheckReport],
                   include_runtime: bool = False) -> str:
    """One CSV row per check."""
    return report_dicts_to_csv(
        report_to_dict(r, include_runtime=include_runtime) for r in reports)


BV_CSV_HEADER = ["x", "Q", "mode", "squarefree_only", "exclude_q0",
                 "total", "normalized", "q", "a_star", "discrepancy",
                 "squarefree", "excluded"]


def bv_dict_to_csv(d: Mapping[str, Any]) -> str:
    """One CSV row per modulus, with the run-level fields repeated."""
    rows = []
    for rec in d["records"]:
        rows.append([
            _round_real(d["x"]),
            d["Q"],
            d["mode"],
            d["squarefree_only"],
            d["exclude_q0"],
            _round_real(d["total"]),
            _round_real(d["normalized"]),
            rec["q"],
            rec["a_star"],
            _round_real(rec["discrepancy"]),
            rec["flags"]["squarefree"],
            rec["flags"]["excluded"],
        ])
    return rows_to_csv(BV_CSV_HEADER, rows)


def bv_result_to_csv(result: BVSumResult) -> str:
    return bv_dict_to_csv(bv_result_to_dict(result))

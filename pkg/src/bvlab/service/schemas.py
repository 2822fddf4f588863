"""Pydantic request/response models for the verification service."""

from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

# -- shared -------------------------------------------------------------


class EnclosureModel(BaseModel):
    """Interval enclosure; lo/hi are kept at full float precision."""

    lo: float
    hi: float
    mid: float
    width: float


class ReportModel(BaseModel):
    """One bound-check report (canonical field order)."""

    check_id: str
    params: Dict[str, Any]
    domain: str
    points: int
    worst_margin: float
    violations: List[Dict[str, Any]]
    runtime_ms: Optional[float] = None
    observational: bool = False
    passed: bool
    notes: Optional[str] = None


# -- constants ----------------------------------------------------------


class ConstantsRequest(BaseModel):
    ids: List[str] = Field(default_factory=lambda: ["all"])
    cutoff: int = 10 ** 6
    precision_target: float = 1e-12


class ConstantEntryModel(BaseModel):
    id: str
    value: EnclosureModel
    cutoff: Optional[int] = None
    meets_precision_target: Optional[bool] = None
    note: str = ""


class ConstantsResponse(BaseModel):
    entries: List[ConstantEntryModel]


# -- verify -------------------------------------------------------------


class VerifyRequest(BaseModel):
    checks: List[str] = Field(default_factory=lambda: ["suite"])
    n: int = 10 ** 5
    q0: Optional[int] = None
    seed: int = 12345
    workers: int = 1
    trials: int = 20
    q_max: int = 30
    coeff_len: int = 2000
    x_len: int = 1024
    y_len: int = 1024
    k_max: int = 8
    r_cut: int = 3
    modulus: Optional[int] = None
    x1: Optional[float] = None
    x: Optional[float] = None


class VerifyResponse(BaseModel):
    ok: bool
    reports: List[ReportModel]
    partition_sums: Optional[Dict[str, float]] = None


# -- discrepancy harness ------------------------------------------------


class BVRequest(BaseModel):
    x: float
    q_max: int
    squarefree_only: bool = False
    exclude_q0: Optional[int] = None
    y_mode: str = "fixed"
    a_param: int = 2
    workers: int = 1


class BVRecordModel(BaseModel):
    q: int
    a_star: int
    discrepancy: float
    flags: Dict[str, bool]


class BVResponse(BaseModel):
    x: float
    Q: int
    mode: str
    squarefree_only: bool
    exclude_q0: Optional[int] = None
    total: float
    normalized: float
    a_param: int
    records: List[BVRecordModel]


# -- progression evaluations --------------------------------------------


class PsiRequest(BaseModel):
    x: float
    q: int
    a: int
    r_cut: Optional[int] = None
    weight: str = "vonMangoldt"


class PsiResponse(BaseModel):
    x: float
    q: int
    a: int
    phi_q: int
    psi: float
    expected: float
    discrepancy: float
    f_R: Optional[float] = None
    r_cut: Optional[int] = None


# -- character tables ---------------------------------------------------


class CharsRequest(BaseModel):
    q: int
    character_cap: int = 10 ** 4


class CharacterModel(BaseModel):
    index: int
    exponents: List[int]
    conductor: int
    order: int
    is_principal: bool
    is_primitive: bool
    is_real: bool


class CharsResponse(BaseModel):
    q: int
    count: int
    primitive_count: int
    characters: List[CharacterModel]


# -- reports (trend / probe) --------------------------------------------


class TrendRequest(BaseModel):
    x_list: List[float]
    a_param: int = 2
    q_override: Optional[List[int]] = None
    squarefree_only: bool = True
    workers: int = 1


class TrendRowModel(BaseModel):
    x: float
    Q: int
    total: float
    normalized: float
    degenerate: bool
    overridden: bool


class TrendResponse(BaseModel):
    a_param: int
    squarefree_only: bool
    note: str
    rows: List[TrendRowModel]


class ProbeRequest(BaseModel):
    q_max: int = 20
    r_min: int = 3
    m_len: int = 64
    n_len: int = 64
    seed: Optional[int] = None
    a_param: int = 2


class ProbeResponse(BaseModel):
    report: ReportModel


class HealthResponse(BaseModel):
    status: str
    version: str

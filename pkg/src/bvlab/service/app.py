"""HTTP front-end for the verification service.

Thin FastAPI wrapper over `bvlab.service.handlers`; the handlers hold all
behaviour, so the in-process CLI path and this HTTP path cannot drift.
Package exceptions map onto status codes: bad parameters (DomainError)
give 400, over-capacity requests (CapacityError) give 507, and an internal
consistency failure (two routes to the same quantity disagreeing) gives
500 — the response body carries `kind` so clients can translate back to
their own error handling.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import CapacityError, ConsistencyError, DomainError
from . import handlers, schemas

app = FastAPI(title="bvlab verification service", version="0.1.0")


@app.exception_handler(DomainError)
async def _domain_error(request: Request, exc: DomainError) -> JSONResponse:
    return JSONResponse(status_code=400,
                        content={"kind": "domain", "error": str(exc)})


@app.exception_handler(CapacityError)
async def _capacity_error(request: Request,
                          exc: CapacityError) -> JSONResponse:
    return JSONResponse(status_code=507,
                        content={"kind": "capacity", "error": str(exc)})


@app.exception_handler(ConsistencyError)
async def _consistency_error(request: Request,
                             exc: ConsistencyError) -> JSONResponse:
    return JSONResponse(status_code=500,
                        content={"kind": "consistency", "error": str(exc)})


@app.get("/health", response_model=schemas.HealthResponse)
async def health() -> schemas.HealthResponse:
    return handlers.health_handler()


@app.post("/constants", response_model=schemas.ConstantsResponse)
async def constants(req: schemas.ConstantsRequest) -> schemas.ConstantsResponse:
    return handlers.constants_handler(req)


@app.post("/verify", response_model=schemas.VerifyResponse)
async def verify(req: schemas.VerifyRequest) -> schemas.VerifyResponse:
    return handlers.verify_handler(req)


@app.post("/bv", response_model=schemas.BVResponse)
async def bv(req: schemas.BVRequest) -> schemas.BVResponse:
    return handlers.bv_handler(req)


@app.post("/psi", response_model=schemas.PsiResponse)
async def psi(req: schemas.PsiRequest) -> schemas.PsiResponse:
    return handlers.psi_handler(req)


@app.post("/chars", response_model=schemas.CharsResponse)
async def chars(req: schemas.CharsRequest) -> schemas.CharsResponse:
    return handlers.chars_handler(req)


@app.post("/report/trend", response_model=schemas.TrendResponse)
async def report_trend(req: schemas.TrendRequest) -> schemas.TrendResponse:
    return handlers.trend_handler(req)


@app.post("/report/probe", response_model=schemas.ProbeResponse)
async def report_probe(req: schemas.ProbeRequest) -> schemas.ProbeResponse:
    return handlers.probe_handler(req)

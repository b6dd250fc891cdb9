"""FastAPI application exposing the solvers as a stateless compute service.

Run with ``uvicorn superradiance.service:app``.  Every endpoint is a POST
of a request model to a pure handler; nothing is cached between requests,
so the service scales horizontally and responses are deterministic
functions of the request body.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import (
    DomainError,
    InvalidParameterError,
    NumericalFailureError,
    ResourceLimitError,
    SchemaError,
    TruncationError,
)
from . import handlers, schemas


def create_app() -> FastAPI:
    from .. import __version__

    app = FastAPI(
        title="superradiance",
        version=__version__,
        description="Mean-field, criticality and exact-diagonalization solvers "
                    "for disordered qubit ensembles coupled to a cavity.",
    )

    @app.exception_handler(InvalidParameterError)
    @app.exception_handler(SchemaError)
    @app.exception_handler(DomainError)
    async def _bad_parameter(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=422, content={
            "detail": str(exc), "error": type(exc).__name__})

    @app.exception_handler(ResourceLimitError)
    @app.exception_handler(TruncationError)
    @app.exception_handler(NumericalFailureError)
    async def _compute_failure(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=400, content={
            "detail": str(exc), "error": type(exc).__name__})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return handlers.health()

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve(req: schemas.SolveRequest) -> schemas.SolveResponse:
        return handlers.solve(req)

    @app.post("/balance", response_model=schemas.BalanceResponse)
    def balance(req: schemas.BalanceRequest) -> schemas.BalanceResponse:
        return handlers.balance(req)

    @app.post("/classify", response_model=schemas.ClassifyResponse)
    def classify(req: schemas.ClassifyRequest) -> schemas.ClassifyResponse:
        return handlers.classify(req)

    @app.post("/sample", response_model=schemas.EnsembleModel)
    def sample(req: schemas.SampleRequest) -> schemas.EnsembleModel:
        return handlers.sample(req)

    @app.post("/fig1", response_model=schemas.Fig1Response)
    def fig1(req: schemas.Fig1Request) -> schemas.Fig1Response:
        return handlers.fig1(req)

    @app.post("/fig2a", response_model=schemas.Fig2aResponse)
    def fig2a(req: schemas.Fig2aRequest) -> schemas.Fig2aResponse:
        return handlers.fig2a(req)

    @app.post("/fig2b", response_model=schemas.Fig2bResponse)
    def fig2b(req: schemas.Fig2bRequest) -> schemas.Fig2bResponse:
        return handlers.fig2b(req)

    @app.post("/boundary", response_model=schemas.BoundaryResponse)
    def boundary(req: schemas.BoundaryRequest) -> schemas.BoundaryResponse:
        return handlers.boundary(req)

    @app.post("/critical-coupling", response_model=schemas.CriticalCouplingResponse)
    def critical_coupling(req: schemas.CriticalCouplingRequest) -> schemas.CriticalCouplingResponse:
        return handlers.critical_coupling(req)

    @app.post("/oracle", response_model=schemas.OracleResponse)
    def oracle(req: schemas.OracleRequest) -> schemas.OracleResponse:
        return handlers.oracle_report(req)

    return app


app = create_app()

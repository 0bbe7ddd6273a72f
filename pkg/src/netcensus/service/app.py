"""FastAPI application wrapping the experiment runners.

Bodies are validated inside each handler so that malformed configuration
always maps to HTTP 400 (not FastAPI's generic 422), mirroring the CLI's
exit code 2; resource-cap violations map to HTTP 409 (CLI exit code 3).
"""

from __future__ import annotations

from typing import Type, TypeVar

from fastapi import Body, FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ValidationError

from ..errors import ConfigError, ResourceCapExceeded
from ..scenarios import (
    run_grid,
    run_landscape,
    run_oracle_check,
    run_scenario,
    run_thresholds,
    scenario_from_dict,
    shot_records_table,
    report_to_json,
    settings_table,
)
from .schemas import (
    GridRequest,
    HealthResponse,
    LandscapeRequest,
    LandscapeResponse,
    OracleCheckRequest,
    OracleCheckResponse,
    SimulateResponse,
    TableResponse,
    ThresholdsRequest,
)

M = TypeVar("M", bound=BaseModel)


def _validate(model: Type[M], payload: dict) -> M:
    try:
        return model.model_validate(payload)
    except ValidationError as exc:
        raise ConfigError(f"invalid {model.__name__} body: {exc}") from exc


def create_app() -> FastAPI:
    from .. import __version__

    app = FastAPI(title="netcensus", version=__version__)

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(ResourceCapExceeded)
    async def _cap_error(request: Request, exc: ResourceCapExceeded) -> JSONResponse:
        return JSONResponse(
            status_code=409,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/thresholds", response_model=TableResponse)
    def thresholds(payload: dict = Body(default_factory=dict)) -> TableResponse:
        req = _validate(ThresholdsRequest, payload)
        return TableResponse.from_table(run_thresholds(req))

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(payload: dict = Body(...)) -> SimulateResponse:
        scenario = scenario_from_dict(payload)
        report, records = run_scenario(scenario)
        shots = (
            TableResponse.from_table(shot_records_table(records)) if records else None
        )
        return SimulateResponse(
            report=report,
            report_json=report_to_json(report),
            settings=TableResponse.from_table(settings_table(report)),
            shots=shots,
        )

    @app.post("/grid", response_model=TableResponse)
    def grid(payload: dict = Body(...)) -> TableResponse:
        req = _validate(GridRequest, payload)
        return TableResponse.from_table(run_grid(req))

    @app.post("/landscape", response_model=LandscapeResponse)
    def landscape(payload: dict = Body(...)) -> LandscapeResponse:
        req = _validate(LandscapeRequest, payload)
        result = run_landscape(req)
        return LandscapeResponse(
            table=TableResponse.from_table(result.table),
            max_fidelity=result.max_fidelity,
            threshold=result.threshold,
        )

    @app.post("/oracle-check", response_model=OracleCheckResponse)
    def oracle_check(payload: dict = Body(default_factory=dict)) -> OracleCheckResponse:
        req = _validate(OracleCheckRequest, payload)
        result = run_oracle_check(req)
        return OracleCheckResponse(
            summary=TableResponse.from_table(result.summary),
            subsets=TableResponse.from_table(result.subsets),
            max_abs_diff=result.max_abs_diff,
            max_excess=result.max_excess,
            passed=result.passed,
        )

    return app

"""Request/response documents for the HTTP service.

Request bodies reuse the scenario-layer models (:class:`ScenarioModel`,
:class:`ThresholdsRequest`, ...).  Responses carry each table twice: as
structured ``header``/``rows`` data and as the exact CSV text the CLI writes,
so a thin client can persist byte-stable files without re-deriving the
formatting.
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel

from ..scenarios import (
    ExperimentReportModel,
    GridRequest,
    LandscapeRequest,
    OracleCheckRequest,
    ScenarioModel,
    TableResult,
    ThresholdsRequest,
    table_to_csv,
)

__all__ = [
    "ErrorBody",
    "ExperimentReportModel",
    "GridRequest",
    "HealthResponse",
    "LandscapeRequest",
    "LandscapeResponse",
    "OracleCheckRequest",
    "OracleCheckResponse",
    "ScenarioModel",
    "SimulateResponse",
    "TableResponse",
    "ThresholdsRequest",
]


class TableResponse(BaseModel):
    header: list[str]
    rows: list[list[Any]]
    csv: str

    @classmethod
    def from_table(cls, table: TableResult) -> "TableResponse":
        return cls(header=table.header, rows=table.rows, csv=table_to_csv(table))


class SimulateResponse(BaseModel):
    report: ExperimentReportModel
    report_json: str
    settings: TableResponse
    shots: Optional[TableResponse] = None


class LandscapeResponse(BaseModel):
    table: TableResponse
    max_fidelity: float
    threshold: float


class OracleCheckResponse(BaseModel):
    summary: TableResponse
    subsets: TableResponse
    max_abs_diff: float
    max_excess: float
    passed: bool


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorBody(BaseModel):
    """Structured error payload: the exception family and its message."""

    error: str
    detail: str

"""HTTP service exposing the experiment runners."""

from .app import create_app
from .schemas import (
    ErrorBody,
    HealthResponse,
    LandscapeResponse,
    OracleCheckResponse,
    SimulateResponse,
    TableResponse,
)

__all__ = [
    "create_app",
    "ErrorBody",
    "HealthResponse",
    "LandscapeResponse",
    "OracleCheckResponse",
    "SimulateResponse",
    "TableResponse",
]

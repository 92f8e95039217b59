"""Pointing-error analysis of optically pre-amplified PPM receivers."""

__version__ = "0.1.0"

from .abep import (
    AmplifierModel,
    CancellationError,
    Deterministic,
    GammaFade,
    PpmConfig,
    abep,
    db_to_linear,
    ebn0_from_link,
    linear_to_db,
)
from .montecarlo import SimResult, SimSpec, simulate_abep
from .numerics import DomainError, NumericalError
from .optimizer import BracketError, OptimumPoint, WidthSearch, optimal_width_curve, optimize_width
from .pointing import PointingGeometry, equivalent_beam, fade_params

__all__ = [
    "AmplifierModel",
    "BracketError",
    "CancellationError",
    "Deterministic",
    "DomainError",
    "GammaFade",
    "NumericalError",
    "OptimumPoint",
    "PointingGeometry",
    "PpmConfig",
    "SimResult",
    "SimSpec",
    "WidthSearch",
    "abep",
    "db_to_linear",
    "ebn0_from_link",
    "equivalent_beam",
    "fade_params",
    "linear_to_db",
    "optimal_width_curve",
    "optimize_width",
    "simulate_abep",
]

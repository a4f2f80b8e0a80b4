"""Steering analysis of entangled cat states: coherent-state and GHZ realisations."""

__version__ = "0.1.0"

from .analytic_cat import (  # noqa: E402
    CatState,
    ConditionalDist,
    ElementOfRealityState,
    MomentSummary,
    QuadratureGrid,
)
from .steering import ConditionalEnsemble, SteeringReport  # noqa: E402

__all__ = [
    "CatState",
    "ConditionalDist",
    "ConditionalEnsemble",
    "ElementOfRealityState",
    "MomentSummary",
    "QuadratureGrid",
    "SteeringReport",
    "__version__",
]

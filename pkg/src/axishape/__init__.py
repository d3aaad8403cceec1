"""Axisymmetric lipid-membrane shape equations: residuals, integration,
first integrals, variational structure and stress charge."""

from ._backend import BACKEND
from .errors import DomainError, SingularError, StepSizeError
from .geometry import ModelParams, ParametricPoint, Profile, State

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DomainError",
    "ModelParams",
    "ParametricPoint",
    "Profile",
    "SingularError",
    "State",
    "StepSizeError",
]

"""Plane-wave scattering by a wedge with Neumann faces: exact time-domain fields."""
from .geometry import (
    ConfigError, CriticalRayError, PolarPoint, Sector, WedgeScene, ac, classify, derive,
)
from .profiles import Profile, ProfileKind
from .quadrature import QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "CriticalRayError", "PolarPoint", "Profile", "ProfileKind",
    "QuadratureSpec", "Sector", "WedgeScene", "ac", "classify", "derive", "__version__",
]

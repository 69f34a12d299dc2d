"""Wedge geometry, derived constants and sector logic.

The scattering region is Q = {(rho, theta): phi <= theta <= 2 pi}; the wedge
occupies the complementary sector 0 < theta < phi.  The incident plane wave
travels in the direction n0 = (cos alpha, sin alpha).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi
DEFAULT_BAND = 1e-6


class ConfigError(ValueError):
    """Invalid scene or evaluation request."""


class CriticalRayError(ValueError):
    """Evaluation requested inside the exclusion band around a critical ray."""

    def __init__(self, theta: float, ray: float, band: float):
        super().__init__(
            f"theta={theta!r} lies within {band:g} rad of the critical ray {ray!r}"
        )
        self.theta = theta
        self.ray = ray
        self.band = band


class Sector(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    CRITICAL1 = "Critical1"
    CRITICAL2 = "Critical2"
    # only reachable for phi=0, where theta=alpha is a shadow boundary
    CRITICAL_SHADOW = "CriticalShadow"


@dataclass(frozen=True)
class WedgeScene:
    phi: float
    alpha: float
    omega0: float = 1.0
    Phi: float = field(init=False)
    q: float = field(init=False)
    theta1: float = field(init=False)
    theta2: float = field(init=False)

    def __post_init__(self):
        if not (0.0 <= self.phi <= math.pi):
            raise ConfigError(f"phi must lie in [0, pi], got {self.phi!r}")
        if not (self.omega0 > 0.0 and math.isfinite(self.omega0)):
            raise ConfigError(f"omega0 must be positive, got {self.omega0!r}")
        if not math.isfinite(self.alpha):
            raise ConfigError("alpha must be finite")
        Phi = TWO_PI - self.phi
        theta1 = 2.0 * self.phi - self.alpha
        if theta1 < self.phi:
            theta1 += TWO_PI
        object.__setattr__(self, "Phi", Phi)
        object.__setattr__(self, "q", math.pi / (2.0 * Phi))
        object.__setattr__(self, "theta1", theta1)
        object.__setattr__(self, "theta2", TWO_PI - self.alpha)

    @property
    def admissible(self) -> bool:
        lo = max(self.phi - math.pi / 2, 0.0)
        hi = min(math.pi / 2, self.phi)
        return lo < self.alpha < hi

    @property
    def degenerate(self) -> bool:
        """phi = pi: the wedge is a half space and the diffracted wave vanishes."""
        return self.phi == math.pi

    @property
    def is_halfplane(self) -> bool:
        return self.phi == 0.0

    def critical_angles(self) -> list[tuple[Sector, float]]:
        """Rays in [phi, 2 pi] on which Z_N(beta + i theta) has a real pole."""
        out = [(Sector.CRITICAL1, self.theta1), (Sector.CRITICAL2, self.theta2)]
        if self.is_halfplane:
            a = math.fmod(self.alpha, TWO_PI)
            if a < 0:
                a += TWO_PI
            if not any(abs(a - r) < 1e-15 for _, r in out):
                out.append((Sector.CRITICAL_SHADOW, a))
        return out

    def describe(self) -> str:
        return (
            f"phi={self.phi!r};alpha={self.alpha!r};omega0={self.omega0!r};"
            f"Phi={self.Phi!r};q={self.q!r};theta1={self.theta1!r};theta2={self.theta2!r}"
        )


def derive(phi: float, alpha: float, omega0: float = 1.0) -> WedgeScene:
    return WedgeScene(float(phi), float(alpha), float(omega0))


@dataclass(frozen=True)
class PolarPoint:
    rho: float
    theta: float

    def __post_init__(self):
        if not (self.rho >= 0.0):
            raise ConfigError(f"rho must be nonnegative, got {self.rho!r}")

    @property
    def xy(self) -> tuple[float, float]:
        return self.rho * math.cos(self.theta), self.rho * math.sin(self.theta)


def check_theta(scene: WedgeScene, theta: float) -> None:
    if not (scene.phi <= theta <= TWO_PI):
        raise ConfigError(f"theta={theta!r} outside [phi, 2pi] = [{scene.phi!r}, 2pi]")


def classify(scene: WedgeScene, theta: float, band: float = DEFAULT_BAND) -> Sector:
    check_theta(scene, theta)
    for tag, ray in scene.critical_angles():
        if abs(theta - ray) <= band:
            return tag
    if theta < scene.theta1:
        return Sector.I
    if theta < scene.theta2:
        return Sector.II
    return Sector.III


def require_noncritical(scene: WedgeScene, theta: float, band: float = DEFAULT_BAND) -> Sector:
    sec = classify(scene, theta, band)
    if sec in (Sector.CRITICAL1, Sector.CRITICAL2, Sector.CRITICAL_SHADOW):
        ray = dict((t, r) for t, r in scene.critical_angles())[sec]
        raise CriticalRayError(theta, ray, band)
    return sec


def ac(x):
    """arccosh(x) for x >= 1 and 0 below; accepts scalars or arrays."""
    xa = np.asarray(x, dtype=float)
    out = np.arccosh(np.maximum(xa, 1.0))
    if out.ndim == 0:
        return float(out)
    return out

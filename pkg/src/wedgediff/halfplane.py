"""Half-plane (Phi = 2 pi) diffracted field in the classical s-integral form.

With theta0 = alpha - pi and c = theta -+ theta0 the comparison field is

    Phi_d = e^{-i w0 t}/(2 pi) * sum_c [-sgn(pi - c) sqrt(rho (1 + cos c))
            int_rho^t e^{i w0 s} / (sqrt(s - rho) (s + rho cos c)) ds]

(one term with c = theta when theta0 = 0).  The s-integral is evaluated
after s = rho cosh b, which removes the inverse square root at s = rho.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import DEFAULT_SPEC, u_d
from .geometry import PolarPoint, WedgeScene, ac, derive
from .kernels import b_halfplane
from .profiles import Profile
from .quadrature import QuadratureSpec, integrate_oscillatory_finite

SGN_BAND = 1e-6


class HalfPlaneError(ValueError):
    pass


def _s_integral(rho: float, t: float, c: float, omega0: float, spec: QuadratureSpec) -> complex:
    """int_rho^t e^{i w0 s}/(sqrt(s - rho)(s + rho cos c)) ds with s = rho cosh b."""
    a = ac(t / rho)
    if a == 0.0:
        return 0j
    cc = math.cos(c)

    def F(b):
        ch = np.cosh(b)
        return np.exp(1j * omega0 * rho * ch) * np.sqrt(ch + 1.0) / (math.sqrt(rho) * (ch + cc))
    lf = lambda b: omega0 * rho * math.sinh(b)
    return integrate_oscillatory_finite(F, 0.0, a, lf, spec)[0]


def _check(rho: float, theta: float, t: float, theta0: float) -> list[float]:
    if not (rho > 0 and t > rho):
        raise HalfPlaneError("need rho > 0 and t > rho")
    cs = [theta] if theta0 == 0.0 else [theta - theta0, theta + theta0]
    for c in cs:
        if abs(abs(c) - math.pi) < SGN_BAND or abs(abs(c) - 3 * math.pi) < SGN_BAND:
            raise HalfPlaneError(f"theta={theta!r} lies on an optical boundary (sgn flip)")
    return cs


def hewett_phi_d(rho: float, theta: float, t: float, theta0: float, omega0: float = 1.0,
                 route: str = "s", spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """Comparison field Phi_d.

    route="s": the s-integral form above.
    route="beta": for theta0 != 0 the kernel form i e^{-i w0 t}/(2 pi) int e^{i w0 rho cosh b} B(b) db;
    for theta0 = 0 the s-form rewritten in b (the substitution is exact there).
    """
    cs = _check(rho, theta, t, theta0)
    ph = np.exp(-1j * omega0 * t) / (2 * math.pi)
    if route == "s":
        tot = 0j
        for c in cs:
            tot += -np.sign(math.pi - c) * math.sqrt(rho * (1 + math.cos(c))) * _s_integral(rho, t, c, omega0, spec)
        return complex(ph * tot)
    if route != "beta":
        raise ValueError(route)
    a = ac(t / rho)
    lf = lambda b: omega0 * rho * abs(math.sinh(b))
    if theta0 == 0.0:
        cth = math.cos(theta)
        half = math.cos(theta / 2)

        def F0(b):
            return np.exp(1j * omega0 * rho * np.cosh(b)) * np.cosh(b / 2) / (np.cosh(b) + cth)
        v = integrate_oscillatory_finite(F0, -a, a, lf, spec, [0.0])[0]
        return complex(-ph * np.sign(math.pi - theta) * abs(half) * v)
    alpha = theta0 + math.pi

    def F(b):
        return np.exp(1j * omega0 * rho * np.cosh(b)) * b_halfplane(alpha, b, theta)
    v = integrate_oscillatory_finite(F, -a, a, lf, spec, [0.0])[0]
    return complex(1j * ph * v)


@dataclass(frozen=True)
class HalfPlaneRow:
    rho: float
    theta: float
    t: float
    u_d: complex
    phi_d: complex
    factor: float

    @property
    def deviation(self) -> float:
        """|u_d - factor * Phi_d|."""
        return abs(self.u_d - self.factor * self.phi_d)

    @property
    def deviation_flipped(self) -> float:
        """|u_d + factor * Phi_d|: agreement up to an overall sign."""
        return abs(self.u_d + self.factor * self.phi_d)


@dataclass(frozen=True)
class HalfPlaneReport:
    alpha: float
    theta0: float
    rows: tuple[HalfPlaneRow, ...]

    @property
    def max_deviation(self) -> float:
        return max(r.deviation for r in self.rows)

    @property
    def max_deviation_flipped(self) -> float:
        return max(r.deviation_flipped for r in self.rows)


def halfplane_compare(alpha: float, points: list[tuple[float, float, float]], omega0: float = 1.0,
                      route: str = "s", spec: QuadratureSpec = DEFAULT_SPEC) -> HalfPlaneReport:
    """u_d of the phi=0 scene against Phi_d (theta0 != 0) or 2 Phi_d (theta0 = 0)."""
    scene: WedgeScene = derive(0.0, alpha, omega0)
    theta0 = alpha - math.pi
    factor = 2.0 if theta0 == 0.0 else 1.0
    prof = Profile.heaviside()
    rows = []
    for rho, theta, t in points:
        ud = u_d(scene, prof, PolarPoint(rho, theta), t, spec)
        pd = hewett_phi_d(rho, theta, t, theta0, omega0, route, spec)
        rows.append(HalfPlaneRow(rho, theta, t, ud, pd, factor))
    return HalfPlaneReport(alpha, theta0, tuple(rows))

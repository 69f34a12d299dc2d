"""Limiting amplitudes, the residual R_d and its large-time asymptotics.

A_in = e^{i w0 rho cos(theta - alpha)}, A_r the reflected plane waves,
A_d = i/(4 Phi) int e^{i w0 rho cosh b} Z_N(b + i theta) db and
A_inf = A_in + A_r + A_d.  The same A_inf is also available as a single
contour integral of H_N over C1+.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import (
    DEFAULT_SPEC, Representation, _sum_paths, incident_lit, contour_c1_plus, j_d, tail_integral, u_d_with_error,
)
from .geometry import DEFAULT_BAND, PolarPoint, WedgeScene, ac, check_theta, require_noncritical
from .kernels import h_nn, z_nn, zn_expansion
from .profiles import Profile
from .quadrature import QuadratureSpec


@dataclass(frozen=True)
class AmplitudeSet:
    a_in: complex
    a_r: complex
    a_d: complex

    @property
    def a_inf(self) -> complex:
        return self.a_in + self.a_r + self.a_d


def a_reflected(scene: WedgeScene, p: PolarPoint) -> complex:
    # half-open sectors: [phi, theta1) and (theta2, 2 pi]; only the second for phi = 0
    w0 = scene.omega0
    if scene.is_halfplane:
        if p.theta > scene.theta2:
            return complex(np.exp(1j * w0 * p.rho * math.cos(p.theta - scene.theta2)))
        return 0j
    if p.theta < scene.theta1:
        return complex(np.exp(1j * w0 * p.rho * math.cos(p.theta - scene.theta1)))
    if p.theta > scene.theta2:
        return complex(np.exp(1j * w0 * p.rho * math.cos(p.theta - scene.theta2)))
    return 0j


def a_components(scene: WedgeScene, p: PolarPoint, spec: QuadratureSpec = DEFAULT_SPEC,
                 band: float | None = DEFAULT_BAND) -> AmplitudeSet:
    check_theta(scene, p.theta)
    if band is not None:
        require_noncritical(scene, p.theta, band)
    a_in = complex(np.exp(1j * scene.omega0 * p.rho * math.cos(p.theta - scene.alpha)))
    if not incident_lit(scene, p.theta):
        a_in = 0j
    jd = j_d(scene, p, complex(scene.omega0), Representation.REAL_LINE, spec, band).value
    return AmplitudeSet(a_in, a_reflected(scene, p), complex(1j / (4 * scene.Phi) * jd))


def a_inf_contour(scene: WedgeScene, p: PolarPoint, spec: QuadratureSpec = DEFAULT_SPEC,
                  band: float | None = DEFAULT_BAND) -> complex:
    """(i/(4 Phi)) int_{C1+} e^{-w0 rho sinh b} H_N(b + i theta) db."""
    check_theta(scene, p.theta)
    if band is not None:
        require_noncritical(scene, p.theta, band)
    if not p.rho > 0:
        raise ValueError("the C1+ route needs rho > 0")
    w0, rho, th = scene.omega0, p.rho, p.theta

    def F(b):
        return np.exp(-w0 * rho * np.sinh(b)) * h_nn(scene, np.asarray(b) + 1j * th)
    v, _ = _sum_paths(F, contour_c1_plus(), max(w0 * rho * 0.5, 1e-3), spec)
    return complex(1j / (4 * scene.Phi) * v)


def a_d_time(scene: WedgeScene, profile: Profile, p: PolarPoint, t: float,
             spec: QuadratureSpec = DEFAULT_SPEC, band: float | None = DEFAULT_BAND) -> complex:
    v, _ = u_d_with_error(scene, profile, p, t, spec, band)
    return complex(v * np.exp(1j * scene.omega0 * t))


def a_total_time(scene: WedgeScene, profile: Profile, p: PolarPoint, t: float,
                 spec: QuadratureSpec = DEFAULT_SPEC, band: float | None = DEFAULT_BAND) -> complex:
    """A(rho, theta, t) = u(rho, theta, t) e^{i w0 t}."""
    from .fields import u_total
    return complex(u_total(scene, profile, p, t, spec, band).value * np.exp(1j * scene.omega0 * t))


def r_d(scene: WedgeScene, p: PolarPoint, t: float, spec: QuadratureSpec = DEFAULT_SPEC,
        band: float | None = DEFAULT_BAND) -> complex:
    """R_d = A_d - A_d(t) = i/(4 Phi) int_{|b| >= ac(t/rho)} e^{i w0 rho cosh b} Z_N db (Heaviside)."""
    check_theta(scene, p.theta)
    if band is not None:
        require_noncritical(scene, p.theta, band)
    if scene.degenerate:
        return 0j
    if not (p.rho > 0 and t > 0):
        raise ValueError("r_d needs rho > 0 and t > 0")
    w0, rho, th = scene.omega0, p.rho, p.theta
    a = ac(t / rho)

    def F(b):
        return np.exp(1j * w0 * rho * np.cosh(b)) * z_nn(scene, b, th, band=None)
    rate = 2 * scene.q
    vr, _ = tail_integral(F, a, math.pi / 2, rate, spec)
    vl, _ = tail_integral(lambda u: F(-u), a, math.pi / 2, rate, spec)
    return complex(1j / (4 * scene.Phi) * (vr + vl))


def e_p(rho: float, t: float, pexp: float, omega0: float, spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """E_p = int_{ac(t/rho)}^inf e^{i w0 rho cosh b - p b} db."""
    if not (pexp > 0 and rho > 0):
        raise ValueError("e_p needs p > 0 and rho > 0")
    a = ac(t / rho)
    F = lambda b: np.exp(1j * omega0 * rho * np.cosh(b) - pexp * b)
    delta = math.pi / 2 if omega0 * rho > 0 else 0.0
    return tail_integral(F, a, delta, pexp, spec)[0]


def e_p_leading(rho: float, t: float, pexp: float, omega0: float, order: int = 2) -> complex:
    """Large-t expansion of E_p: leading term and, with order=2, the t^{-(p+2)} correction."""
    lead = -np.exp(1j * omega0 * t) * rho**pexp / (2**pexp * 1j * omega0 * t ** (pexp + 1))
    if order < 2:
        return complex(lead)
    corr = -np.exp(1j * omega0 * t) * rho**pexp * (pexp + 1) / (2**pexp * (1j * omega0) ** 2 * t ** (pexp + 2))
    return complex(lead + corr)


def r_d_series(scene: WedgeScene, p: PolarPoint, t: float, terms: int = 6,
               spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """-(b1/(4 Phi)) sum_m z_m E_{2qm}: the R_d series without the remainder."""
    ex = zn_expansion(scene, p.theta, max(terms, 1))
    tot = 0j
    for m in range(1, terms + 1):
        zm = ex.z[m - 1]
        if zm != 0.0:
            tot += zm * e_p(p.rho, t, 2 * scene.q * m, scene.omega0, spec)
    return complex(-ex.b1 / (4 * scene.Phi) * tot)


@dataclass(frozen=True)
class RatePrediction:
    re_coeff: float
    re_exponent: float
    im_coeff: float
    im_exponent: float
    order: int = 1


def rate_prediction(scene: WedgeScene, p: PolarPoint, order: int | None = 1,
                    zero_tol: float = 1e-12) -> RatePrediction:
    """Leading large-t behaviour of e^{-i w0 t} R_d.

    Im ~ -(b1 z_m/(4 Phi w0)) (rho/2)^{2qm} t^{-(2qm+1)}
    Re ~ -(b1 z_m (2qm+1)/(4 Phi w0^2)) (rho/2)^{2qm} t^{-(2qm+2)}

    with m = 1 for the generic case.  ``order=None`` picks the
    first m with z_m != 0 (z_1 vanishes identically when cos[(pi/Phi)(pi-alpha)] = 0).
    """
    ex = zn_expansion(scene, p.theta)
    if order is None:
        order = next((m for m, z in enumerate(ex.z, 1) if abs(z) > zero_tol), 1)
    m = order
    pm = 2 * scene.q * m
    zm = ex.z[m - 1]
    w0, Phi = scene.omega0, scene.Phi
    base = ex.b1 * zm / (4 * Phi) * (p.rho / 2) ** pm
    return RatePrediction(
        re_coeff=-base * (pm + 1) / w0**2, re_exponent=-(pm + 2),
        im_coeff=-base / w0, im_exponent=-(pm + 1), order=m,
    )


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    npoints: int

    @property
    def coeff(self) -> float:
        return math.exp(self.intercept)


def fit_loglog(t: np.ndarray, y: np.ndarray, floor: float = 0.0) -> SlopeFit:
    """Least-squares line through (log t, log|y|), dropping |y| <= floor."""
    t = np.asarray(t, dtype=float)
    y = np.abs(np.asarray(y))
    keep = y > floor
    if keep.sum() < 3:
        raise ValueError("not enough points above the noise floor")
    sl, ic = np.polyfit(np.log(t[keep]), np.log(y[keep]), 1)
    return SlopeFit(float(sl), float(ic), int(keep.sum()))


def rate_sweep(scene: WedgeScene, p: PolarPoint, t_lo: float, t_hi: float,
               per_decade: int = 16, spec: QuadratureSpec = DEFAULT_SPEC) -> tuple[np.ndarray, np.ndarray]:
    """e^{-i w0 t} R_d on a geometric t-grid."""
    n = int(round(per_decade * math.log10(t_hi / t_lo))) + 1
    ts = np.geomspace(t_lo, t_hi, n)
    vals = np.array([np.exp(-1j * scene.omega0 * t) * r_d(scene, p, t, spec) for t in ts])
    return ts, vals


@dataclass(frozen=True)
class RateFit:
    im: SlopeFit
    re: SlopeFit
    prediction: RatePrediction
    im_sign: int
    re_sign: int


def fit_rates(scene: WedgeScene, p: PolarPoint, t_lo: float | None = None, t_hi: float | None = None,
              spec: QuadratureSpec = DEFAULT_SPEC, order: int | None = 1) -> RateFit:
    t_lo = 10 * p.rho if t_lo is None else t_lo
    t_hi = 1000 * p.rho if t_hi is None else t_hi
    ts, v = rate_sweep(scene, p, t_lo, t_hi, spec=spec)
    floor = 1e3 * spec.abs_tol
    im = fit_loglog(ts, v.imag, floor)
    re = fit_loglog(ts, v.real, floor)
    tail = slice(len(ts) // 2, None)
    return RateFit(
        im, re, rate_prediction(scene, p, order),
        int(np.sign(np.median(v.imag[tail]))), int(np.sign(np.median(v.real[tail]))),
    )

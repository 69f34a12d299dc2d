"""Time-domain fields u_in, u_r, u_d and their frequency-domain counterparts.

The diffracted wave is

    u_d(rho, theta, t) = i e^{-i w0 t}/(4 Phi) int e^{i w0 rho cosh b} Z_N(b + i theta) f(t - rho cosh b) db

and the total field is u = u_in + u_r + u_d.  Real-line integrals whose
phase grows like cosh(b) are evaluated on a deformed path: the real segment
[-x0, x0], then vertical legs to +-x0 + i delta and horizontal rays on which
e^{i omega rho cosh b} decays super-exponentially.  Z_N(b + i theta) has all
its poles on the imaginary axis, so the deformation is exact.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import DEFAULT_BAND, TWO_PI, PolarPoint, Sector, WedgeScene, ac, check_theta, require_noncritical
from .kernels import h_nn, z_nn, z_nn_dbeta
from .profiles import Profile, f_eval, f_prime_eval, g_hat, g_hat_direct
from .quadrature import (
    ContourPath, QuadratureSpec, Ray, Segment, integrate_adaptive, integrate_contour,
    integrate_decaying, integrate_oscillatory_finite,
)

X0 = 1.0
DEFAULT_SPEC = QuadratureSpec()


# ---------------------------------------------------------------- path helpers

def tail_integral(F: Callable[[np.ndarray], np.ndarray], a: float, delta: float,
                  rate: float, spec: QuadratureSpec, x0: float = X0):
    """int_a^inf F(b) db along a -> max(a,x0) -> max(a,x0) + i delta -> +inf + i delta.

    F must be analytic in the strip swept by the deformation (Re b >= min(a, x0) > 0
    or poles only on the imaginary axis) and decay along the final ray.
    """
    val = 0j
    err = 0.0
    lo = max(a, x0)
    if a < x0:
        v, e = integrate_adaptive(F, a, x0, spec)
        val += v
        err += e
    if delta == 0.0:
        v, e = integrate_contour(F, ContourPath((Ray(complex(lo), 1 + 0j),)), rate, spec)
    else:
        top = complex(lo, delta)
        path = ContourPath((Segment(complex(lo), top), Ray(top, 1 + 0j)))
        v, e = integrate_contour(F, path, rate, spec)
    return val + v, err + e


def line_integral(F: Callable[[np.ndarray], np.ndarray], delta: float, rate: float,
                  spec: QuadratureSpec, x0: float = X0):
    """int over the whole real line using tail_integral on both sides.

    The left half uses b -> -b so the same upward tilt applies when
    F(-b) has the same decay structure as F(b).
    """
    vm, em = integrate_adaptive(F, -x0, x0, spec, [0.0])
    vr, er = tail_integral(F, x0, delta, rate, spec, x0)
    vl, el = tail_integral(lambda u: F(-u), x0, delta, rate, spec, x0)
    return vm + vr + vl, em + er + el


def phase_tilt(omega: complex) -> float:
    """Imaginary offset for rays so that |e^{i omega rho cosh b}| decays fastest."""
    if omega == 0:
        return 0.0
    return math.pi / 2 - math.atan2(omega.imag, omega.real)


# ---------------------------------------------------------------- incident / reflected

def _plane(omega0: float, profile: Profile, rho: float, theta: float, direction: float, t: float,
           dtheta: int = 0) -> complex:
    c = rho * math.cos(theta - direction)
    ph = np.exp(1j * omega0 * (c - t))
    f = f_eval(profile, t - c)
    if dtheta == 0:
        return complex(ph * f)
    dc = -rho * math.sin(theta - direction)
    fp = f_prime_eval(profile, t - c) if profile.smooth else 0.0
    return complex(ph * (1j * omega0 * f - fp) * dc)


def u_in(scene: WedgeScene, profile: Profile, p: PolarPoint, t: float, dtheta: int = 0) -> complex:
    return _plane(scene.omega0, profile, p.rho, p.theta, scene.alpha, t, dtheta)


def _alpha_mod(scene: WedgeScene) -> float:
    a = math.fmod(scene.alpha, TWO_PI)
    return a + TWO_PI if a < 0 else a


def incident_lit(scene: WedgeScene, theta: float) -> bool:
    """False only in the half-plane shadow theta < alpha.

    For phi = 0 the geometric part implied by the kernel is u_in on theta >= alpha
    and one reflected wave (direction theta2) on theta >= theta2; the diffracted
    wave jumps by exactly these amounts on the two rays.
    """
    return not scene.is_halfplane or theta >= _alpha_mod(scene)


def reflected_direction(scene: WedgeScene, theta: float) -> float | None:
    """Direction of the reflected plane wave present at theta (closed sectors), or None."""
    if scene.is_halfplane:
        return scene.theta2 if theta >= scene.theta2 else None
    if theta <= scene.theta1:
        return scene.theta1
    if theta >= scene.theta2:
        return scene.theta2
    return None


def u_r(scene: WedgeScene, profile: Profile, p: PolarPoint, t: float, dtheta: int = 0) -> complex:
    check_theta(scene, p.theta)
    d = reflected_direction(scene, p.theta)
    if d is None:
        return 0j
    return _plane(scene.omega0, profile, p.rho, p.theta, d, t, dtheta)


def u_r_branch(scene: WedgeScene, profile: Profile, l: int, p: PolarPoint, t: float, dtheta: int = 0) -> complex:
    """u_{r,l} continued as a plane wave to any angle (no sector cut)."""
    d = scene.theta1 if l == 1 else scene.theta2
    return _plane(scene.omega0, profile, p.rho, p.theta, d, t, dtheta)


# ---------------------------------------------------------------- diffracted wave

def _zn(scene, theta, band):
    return lambda b: z_nn(scene, b, theta, band=None)


def u_d_with_error(scene: WedgeScene, profile: Profile, p: PolarPoint, t: float,
                   spec: QuadratureSpec = DEFAULT_SPEC, band: float | None = DEFAULT_BAND,
                   dtheta: int = 0) -> tuple[complex, float]:
    """Diffracted wave (or its theta-derivative) with a quadrature error estimate."""
    check_theta(scene, p.theta)
    if band is not None:
        require_noncritical(scene, p.theta, band)
    if scene.degenerate:
        return 0j, 0.0
    w0, rho, th = scene.omega0, p.rho, p.theta
    pref = 1j * np.exp(-1j * w0 * t) / (4 * scene.Phi)
    Z = _zn(scene, th, band)

    if rho == 0.0:
        if dtheta:
            return 0j, 0.0
        ft = f_eval(profile, t)
        if ft == 0.0:
            return 0j, 0.0
        v, e = integrate_decaying(Z, 2 * scene.q, spec)
        return complex(pref * ft * v), abs(pref) * e

    a = ac(t / rho)
    if a == 0.0:
        return 0j, 0.0
    lf = lambda b: w0 * rho * abs(math.sinh(b))
    pts = [0.0]
    if profile.smooth and t - profile.s0 > rho:
        a0 = ac((t - profile.s0) / rho)
        pts += [-a0, a0]
    lim = a
    if dtheta == 0:
        # Z_N tail beyond lim is below abs_tol: |Z| <= C e^{-2q|b|}
        bprobe = 2.0 / scene.q
        C = max(abs(Z(np.array([bprobe, -bprobe]))).max() * math.exp(2 * scene.q * bprobe), 1.0)
        bdec = math.log(C / (2 * scene.q * spec.abs_tol * 1e-2)) / (2 * scene.q)
        lim = min(a, max(bdec, bprobe))

    if dtheta == 0:
        def F(b):
            c = rho * np.cosh(b)
            return np.exp(1j * w0 * c) * f_eval(profile, t - c) * Z(b)
        v, e = integrate_oscillatory_finite(F, -lim, lim, lf, spec, pts)
        return complex(pref * v), abs(pref) * e

    # theta-derivative: d/dtheta Z(b + i theta) = i dZ/db, then integrate by parts
    # so that only Z itself (not its derivative) meets the near-pole at b = 0.
    def G(b):
        c = rho * np.cosh(b)
        s = t - c
        fp = f_prime_eval(profile, s) if profile.smooth else 0.0
        return rho * np.sinh(b) * np.exp(1j * w0 * c) * (1j * w0 * f_eval(profile, s) - fp) * Z(b)
    v, e = integrate_oscillatory_finite(G, -a, a, lf, spec, pts)
    v = -1j * v
    if not profile.smooth:
        # boundary terms of the integration by parts (f jumps at |b| = a)
        v += 1j * np.exp(1j * w0 * t) * (Z(np.array([a]))[0] - Z(np.array([-a]))[0])
    return complex(pref * v), abs(pref) * e


def u_d(scene: WedgeScene, profile: Profile, p: PolarPoint, t: float,
        spec: QuadratureSpec = DEFAULT_SPEC, band: float | None = DEFAULT_BAND,
        dtheta: int = 0) -> complex:
    return u_d_with_error(scene, profile, p, t, spec, band, dtheta)[0]


@dataclass(frozen=True)
class FieldValue:
    value: complex
    u_in: complex
    u_r: complex
    u_d: complex
    error_estimate: float


def u_total(scene: WedgeScene, profile: Profile, p: PolarPoint, t: float,
            spec: QuadratureSpec = DEFAULT_SPEC, band: float | None = DEFAULT_BAND) -> FieldValue:
    ui = u_in(scene, profile, p, t) if incident_lit(scene, p.theta) else 0j
    ur = u_r(scene, profile, p, t)
    ud, err = u_d_with_error(scene, profile, p, t, spec, band)
    return FieldValue(ui + ur + ud, ui, ur, ud, err)


def u_s(scene: WedgeScene, profile: Profile, p: PolarPoint, t: float,
        spec: QuadratureSpec = DEFAULT_SPEC, band: float | None = DEFAULT_BAND,
        dtheta: int = 0) -> complex:
    """Scattered field u - u_in: u_r + u_d, less u_in in the half-plane shadow."""
    v = u_r(scene, profile, p, t, dtheta) + u_d(scene, profile, p, t, spec, band, dtheta)
    if not incident_lit(scene, p.theta):
        v -= u_in(scene, profile, p, t, dtheta)
    return v


def w_d(scene: WedgeScene, profile: Profile, p: PolarPoint, t: float,
        spec: QuadratureSpec = DEFAULT_SPEC, band: float | None = DEFAULT_BAND) -> complex:
    """i e^{-i w0 t} int e^{i rho w0 cosh b} Z_N(b + i theta) f'(t - rho cosh b) db."""
    if not profile.smooth:
        raise ValueError("w_d needs a smooth ramp")
    check_theta(scene, p.theta)
    if band is not None:
        require_noncritical(scene, p.theta, band)
    if scene.degenerate:
        return 0j
    w0, rho = scene.omega0, p.rho
    Z = _zn(scene, p.theta, band)
    pref = 1j * np.exp(-1j * w0 * t)
    if rho == 0.0:
        fp = f_prime_eval(profile, t)
        return complex(pref * fp * integrate_decaying(Z, 2 * scene.q, spec)[0]) if fp else 0j
    a = ac(t / rho)
    if a == 0.0:
        return 0j
    a0 = ac((t - profile.s0) / rho)

    def F(b):
        c = rho * np.cosh(b)
        return np.exp(1j * w0 * c) * f_prime_eval(profile, t - c) * Z(b)
    lf = lambda b: w0 * rho * abs(math.sinh(b))
    v = 0j
    if a0 > 0:
        v += integrate_oscillatory_finite(F, -a, -a0, lf, spec)[0]
        v += integrate_oscillatory_finite(F, a0, a, lf, spec)[0]
    else:
        v += integrate_oscillatory_finite(F, -a, a, lf, spec, [0.0])[0]
    return complex(pref * v)


# ---------------------------------------------------------------- stationary objects

class Representation(enum.Enum):
    CONTOUR_C0 = "ContourC0"
    REAL_LINE = "RealLine"
    CONTOUR_C = "ContourC"


@dataclass(frozen=True)
class StationaryValue:
    omega: complex
    value: complex
    representation: Representation
    error_estimate: float = 0.0


def _sommerfeld(scene: WedgeScene, theta: float, rho: float, omega: complex):
    def F(b):
        return np.exp(-rho * omega * np.sinh(b)) * h_nn(scene, np.asarray(b) + 1j * theta)
    return F


def contour_c0() -> list[ContourPath]:
    """C0 = gamma_1 u gamma_2: Im b = -5pi/2 left to right, Im b = -pi/2 right to left."""
    lo, hi = -2.5j * math.pi, -0.5j * math.pi
    g2 = ContourPath((Ray(lo, -1 + 0j, incoming=True), Ray(lo, 1 + 0j)))
    g1 = ContourPath((Ray(hi, 1 + 0j, incoming=True), Ray(hi, -1 + 0j)))
    return [g2, g1]


def contour_c1() -> ContourPath:
    """+inf - i pi/2 -> 1 - i pi/2 -> 1 - 5i pi/2 -> +inf - 5i pi/2."""
    return ContourPath.polyline([1 - 0.5j * math.pi, 1 - 2.5j * math.pi], start_ray=1 + 0j, end_ray=1 + 0j)


def contour_c() -> list[ContourPath]:
    c1 = contour_c1()
    c2 = c1.negated().shifted(-3j * math.pi)
    return [c1, c2]


def contour_c1_plus() -> list[ContourPath]:
    c1 = contour_c1()
    return [c1.shifted(0.25j * math.pi), c1.negated().shifted(-3.25j * math.pi)]


def _sum_paths(F, paths, rate, spec):
    vals, err = [], 0.0
    for path in paths:
        v, e = integrate_contour(F, path, rate, spec)
        vals.append(v)
        err += e
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals)), err


def j_d(scene: WedgeScene, p: PolarPoint, omega: complex,
        representation: Representation = Representation.REAL_LINE,
        spec: QuadratureSpec = DEFAULT_SPEC, band: float | None = DEFAULT_BAND) -> StationaryValue:
    """J_d = int_{C0} e^{-rho w sinh b} H_N(b + i theta) db = int_R e^{i rho w cosh b} Z_N(b + i theta) db."""
    omega = complex(omega)
    check_theta(scene, p.theta)
    if band is not None:
        require_noncritical(scene, p.theta, band)
    rho, th = p.rho, p.theta
    if representation is Representation.REAL_LINE:
        if omega.imag < 0:
            raise ValueError("RealLine representation needs Im omega >= 0")
        if scene.degenerate:
            return StationaryValue(omega, 0j, representation)
        Z = _zn(scene, th, band)
        F = lambda b: np.exp(1j * rho * omega * np.cosh(b)) * Z(b)
        delta = phase_tilt(omega) if rho * abs(omega) > 0 else 0.0
        v, e = line_integral(F, delta, 2 * scene.q, spec)
        return StationaryValue(omega, v, representation, e)
    if representation is Representation.CONTOUR_C0:
        if not omega.imag > 0:
            raise ValueError("ContourC0 representation needs Im omega > 0")
        F = _sommerfeld(scene, th, rho, omega)
        rate = max(rho * omega.imag, 1e-3)
        v, e = _sum_paths(F, contour_c0(), rate, spec)
        return StationaryValue(omega, v, representation, e)
    raise ValueError(f"unsupported representation {representation}")


def u_hat_d(scene: WedgeScene, profile: Profile, p: PolarPoint, omega: complex,
            spec: QuadratureSpec = DEFAULT_SPEC, route: str = "g1",
            representation: Representation = Representation.REAL_LINE) -> complex:
    """(i/(4 Phi)) g^(omega) J_d(omega); g^ via g1^/(omega - omega0) or the direct transform."""
    omega = complex(omega)
    if omega == scene.omega0:
        raise ValueError("u_hat_d has a pole at omega = omega0")
    if route == "g1":
        g = g_hat(profile, scene.omega0, omega, spec)
    elif route == "direct":
        g = g_hat_direct(profile, scene.omega0, omega, spec)
    else:
        raise ValueError(route)
    jd = j_d(scene, p, omega, representation, spec).value
    return complex(1j / (4 * scene.Phi) * g * jd)


def u_hat_r(scene: WedgeScene, profile: Profile, p: PolarPoint, omega: complex,
            spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    d = reflected_direction(scene, p.theta)
    if d is None:
        return 0j
    g = g_hat(profile, scene.omega0, omega, spec)
    return complex(g * np.exp(1j * omega * p.rho * math.cos(p.theta - d)))


def f2_contour(scene: WedgeScene, p: PolarPoint, omega: complex,
               spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """int_C e^{-rho w sinh b} H_N(b + i theta) db over C = C1 u C2."""
    omega = complex(omega)
    if not omega.imag > 0:
        raise ValueError("contour C needs Im omega > 0")
    F = _sommerfeld(scene, p.theta, p.rho, omega)
    rate = max(p.rho * omega.imag * math.cosh(1.0) / 2, 1e-3)
    return _sum_paths(F, contour_c(), rate, spec)[0]


def u_hat_s(scene: WedgeScene, profile: Profile, p: PolarPoint, omega: complex,
            spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """-g^ e^{i rho w cos(theta - alpha)} + (i g^/(4 Phi)) int_C e^{-rho w sinh b} H_N(b + i theta) db."""
    omega = complex(omega)
    g = g_hat(profile, scene.omega0, omega, spec)
    f1 = -g * np.exp(1j * p.rho * omega * math.cos(p.theta - scene.alpha))
    return complex(f1 + 1j * g / (4 * scene.Phi) * f2_contour(scene, p, omega, spec))

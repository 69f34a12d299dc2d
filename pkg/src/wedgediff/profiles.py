"""Incident-wave profiles f and the transforms built on them."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .quadrature import QuadratureSpec, integrate_adaptive


class ProfileKind(enum.Enum):
    SMOOTH_RAMP = "ramp"
    HEAVISIDE = "heaviside"


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class Profile:
    kind: ProfileKind = ProfileKind.SMOOTH_RAMP
    s0: float = 1.0

    def __post_init__(self):
        if self.kind is ProfileKind.SMOOTH_RAMP and not (self.s0 > 0):
            raise ProfileError("smooth ramp needs s0 > 0")
        if self.kind is ProfileKind.HEAVISIDE and self.s0 != 0.0:
            object.__setattr__(self, "s0", 0.0)

    @classmethod
    def ramp(cls, s0: float = 1.0) -> "Profile":
        return cls(ProfileKind.SMOOTH_RAMP, float(s0))

    @classmethod
    def heaviside(cls) -> "Profile":
        return cls(ProfileKind.HEAVISIDE, 0.0)

    @property
    def smooth(self) -> bool:
        return self.kind is ProfileKind.SMOOTH_RAMP

    def describe(self) -> str:
        return f"{self.kind.value}(s0={self.s0!r})"


def _ramp_parts(x):
    # h(x) = e(x)/(e(x)+e(1-x)) = expit(1/(1-x) - 1/x) on 0 < x < 1
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    xi = np.where(inside, x, 0.5)
    z = 1.0 / (1.0 - xi) - 1.0 / xi
    return x, inside, xi, z


def ramp_h(x):
    x, inside, _, z = _ramp_parts(x)
    return np.where(inside, expit(z), np.where(x >= 1, 1.0, 0.0))


def ramp_h_prime(x):
    x, inside, xi, z = _ramp_parts(x)
    s = expit(z)
    dz = 1.0 / xi**2 + 1.0 / (1.0 - xi) ** 2
    return np.where(inside, s * (1.0 - s) * dz, 0.0)


def _out(v):
    v = np.asarray(v)
    return v.item() if v.ndim == 0 else v


def f_eval(p: Profile, s):
    s = np.asarray(s, dtype=float)
    if p.smooth:
        return _out(ramp_h(s / p.s0))
    return _out(np.where(s >= 0, 1.0, 0.0))


def f_prime_eval(p: Profile, s):
    if not p.smooth:
        raise ProfileError("the Heaviside derivative is not a function")
    s = np.asarray(s, dtype=float)
    return _out(ramp_h_prime(s / p.s0) / p.s0)


def g1_eval(p: Profile, omega0: float, s):
    s = np.asarray(s, dtype=float)
    return _out(1j * np.exp(-1j * omega0 * s) * f_prime_eval(p, s))


def g1_hat(p: Profile, omega0: float, omega: complex, spec: QuadratureSpec | None = None) -> complex:
    """int_0^s0 e^{i omega s} g1(s) ds; entire in omega."""
    spec = spec or QuadratureSpec()
    if not p.smooth:
        raise ProfileError("g1_hat needs a smooth ramp")
    w = complex(omega)
    val, _ = integrate_adaptive(
        lambda s: np.exp(1j * w * s) * g1_eval(p, omega0, s), 0.0, p.s0, spec
    )
    return val


def g_hat(p: Profile, omega0: float, omega: complex, spec: QuadratureSpec | None = None) -> complex:
    """Fourier-Laplace transform of e^{-i omega0 s} f(s) via g1_hat/(omega - omega0)."""
    w = complex(omega)
    if w == omega0:
        raise ProfileError("g_hat has a pole at omega = omega0")
    return g1_hat(p, omega0, w, spec) / (w - omega0)


def g_hat_direct(p: Profile, omega0: float, omega: complex, spec: QuadratureSpec | None = None) -> complex:
    """Direct quadrature of int_0^inf e^{i omega s} e^{-i omega0 s} f(s) ds (Im omega > 0)."""
    spec = spec or QuadratureSpec()
    w = complex(omega)
    if w.imag <= 0:
        raise ProfileError("direct transform needs Im omega > 0")
    s_end = p.s0 + math.log(1e12) / w.imag
    integrand = lambda s: np.exp(1j * (w - omega0) * s) * f_eval(p, s)
    pts = [0.0, p.s0] if p.smooth else [0.0]
    pts.append(s_end)
    total = 0j
    for a, b in zip(pts[:-1], pts[1:]):
        if b > a:
            total += integrate_adaptive(integrand, a, b, spec)[0]
    return total

"""Malyuzhinets-type kernels for the NN, DD and DN wedges, plus half-plane kernels.

With q = pi/(2 Phi):

    H_N(b)  = coth[q(b + i pi/2 - i alpha)] + coth[q(b - 3i pi/2 + i alpha)]
    H_DD(b) = coth[q(b + i pi/2 - i alpha)] - coth[q(b - 3i pi/2 + i alpha)]
    H_DN(b) = 1/sinh[q(b + i pi/2 - i alpha)] + 1/sinh[q(b - 3i pi/2 + i alpha)]
    Z_N(b)  = H_N(b - 5i pi/2) - H_N(b - i pi/2)

Z_N(b + i theta) decays like exp(-2q|b|) on the real axis and is the
density of the diffracted wave.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DEFAULT_BAND, WedgeScene, require_noncritical

POLE_TOL = 1e-9


class PoleError(ValueError):
    def __init__(self, pole: complex, dist: float):
        super().__init__(f"kernel evaluated {dist:.3g} from the pole {pole!r}")
        self.pole = pole
        self.dist = dist


def _reduce(w: np.ndarray, period: float) -> np.ndarray:
    y = np.remainder(w.imag + period / 2, period) - period / 2
    return w.real + 1j * y


def _coth_split(q: float, beta, shift: complex):
    """coth(q (beta + shift)) as sign(Re) + remainder; the remainder is exp-small."""
    w = q * (np.asarray(beta, dtype=complex) + shift)
    wr = _reduce(w, math.pi)
    d = np.abs(wr) / q
    if d.size and d.min() < POLE_TOL:
        i = int(np.argmin(d))
        pole = complex(w.ravel()[i] - wr.ravel()[i]) / q - shift
        raise PoleError(pole, float(d.ravel()[i]))
    s = np.where(wr.real >= 0, 1.0, -1.0)
    e = np.exp(-2.0 * s * wr)
    return s, 2.0 * s * e / (1.0 - e)


def coth_q(q: float, beta, shift: complex):
    """coth(q (beta + shift)), overflow safe, with a pole-proximity check."""
    s, rest = _coth_split(q, beta, shift)
    return s + rest


def csch_q(q: float, beta, shift: complex):
    """1/sinh(q (beta + shift)), overflow safe."""
    w = q * (np.asarray(beta, dtype=complex) + shift)
    wr = _reduce(w, 2 * math.pi)
    # zeros of sinh sit at i pi k; test distance to 0 and +-i pi
    dd = np.minimum(np.abs(wr), np.minimum(np.abs(wr - 1j * math.pi), np.abs(wr + 1j * math.pi))) / q
    if dd.size and dd.min() < POLE_TOL:
        i = int(np.argmin(dd))
        raise PoleError(complex(w.ravel()[i]) / q - shift, float(dd.ravel()[i]))
    s = np.where(wr.real >= 0, 1.0, -1.0)
    e = np.exp(-s * wr)
    return 2.0 * s * e / (1.0 - e * e)


def dcoth_q(q: float, beta, shift: complex):
    """d/dbeta coth(q(beta + shift)) = -q csch^2."""
    c = csch_q(q, beta, shift)
    return -q * c * c


def _out(v):
    v = np.asarray(v)
    return v.item() if v.ndim == 0 else v


def _shifts(alpha: float) -> tuple[complex, complex]:
    return 1j * (math.pi / 2 - alpha), 1j * (-1.5 * math.pi + alpha)


def h_nn(scene: WedgeScene, beta):
    s1, s2 = _shifts(scene.alpha)
    return _out(coth_q(scene.q, beta, s1) + coth_q(scene.q, beta, s2))


def h_dd(scene: WedgeScene, beta):
    s1, s2 = _shifts(scene.alpha)
    return _out(coth_q(scene.q, beta, s1) - coth_q(scene.q, beta, s2))


def h_dn(scene: WedgeScene, beta):
    s1, s2 = _shifts(scene.alpha)
    return _out(csch_q(scene.q, beta, s1) + csch_q(scene.q, beta, s2))


def _z_terms(scene: WedgeScene, theta: float):
    """Z_N(beta + i theta) = sum sign * coth(q(beta + i c)) over four offsets c."""
    a = scene.alpha
    return (
        (1.0, theta - 2 * math.pi - a),
        (1.0, theta - 4 * math.pi + a),
        (-1.0, theta - a),
        (-1.0, theta - 2 * math.pi + a),
    )


def z_nn(scene: WedgeScene, beta, theta: float, band: float | None = DEFAULT_BAND):
    """Z_N(beta + i theta) = H_N(beta + i theta - 5i pi/2) - H_N(beta + i theta - i pi/2)."""
    if band is not None:
        require_noncritical(scene, theta, band)
    if scene.degenerate:
        return _out(np.zeros(np.shape(beta), dtype=complex))
    b = np.asarray(beta, dtype=complex)
    # the +-1 parts cancel exactly for large |Re beta|; summing them apart
    # keeps full relative accuracy in the exponentially small tails
    const = np.zeros(b.shape)
    out = np.zeros(b.shape, dtype=complex)
    for sg, c in _z_terms(scene, theta):
        s, rest = _coth_split(scene.q, b, 1j * c)
        const += sg * s
        out += sg * rest
    return _out(out + const)


def z_nn_dbeta(scene: WedgeScene, beta, theta: float, band: float | None = DEFAULT_BAND):
    """d/dbeta Z_N(beta + i theta); the theta-derivative is i times this."""
    if band is not None:
        require_noncritical(scene, theta, band)
    if scene.degenerate:
        return _out(np.zeros(np.shape(beta), dtype=complex))
    b = np.asarray(beta, dtype=complex)
    out = np.zeros(b.shape, dtype=complex)
    for sg, c in _z_terms(scene, theta):
        out += sg * dcoth_q(scene.q, b, 1j * c)
    return _out(out)


@dataclass(frozen=True)
class PoleLattice:
    theta: float
    poles: tuple[complex, ...]

    def __contains__(self, z) -> bool:
        return any(abs(p - z) < 1e-12 for p in self.poles)


def poles(scene: WedgeScene, theta: float, window: tuple[float, float, float, float]) -> PoleLattice:
    """Poles of beta -> H_N(beta + i theta) inside [re0, re1] x [im0, im1].

    P1 = {i(-pi/2 + alpha + 2k Phi - theta)} and its image -P1 + i pi - 2i theta.
    All of them are purely imaginary.
    """
    re0, re1, im0, im1 = window
    if not (re0 <= 0.0 <= re1):
        return PoleLattice(theta, ())
    P, a = scene.Phi, scene.alpha
    c1 = -math.pi / 2 + a - theta
    c2 = 1.5 * math.pi - a - theta
    out = set()
    for base, sgn in ((c1, 1), (c2, -1)):
        kmin = math.floor((im0 - base) / (2 * P) * sgn) - 1
        kmax = math.ceil((im1 - base) / (2 * P) * sgn) + 1
        for k in range(min(kmin, kmax) - 1, max(kmin, kmax) + 2):
            y = base + sgn * 2 * k * P
            if im0 - 1e-12 <= y <= im1 + 1e-12:
                out.add(round(y, 13))
    return PoleLattice(theta, tuple(1j * y for y in sorted(out)))


@dataclass(frozen=True)
class ZnExpansion:
    """Z_N(beta + i theta) = i b1 [sum_k z_k^{+-} e^{-+2kq beta} + remainder]."""
    theta: float
    q: float
    b1: float
    z_plus: tuple[complex, ...]
    z_minus: tuple[complex, ...]

    @property
    def z(self) -> tuple[float, ...]:
        return tuple((p + m).real for p, m in zip(self.z_plus, self.z_minus))

    @property
    def z_imag(self) -> tuple[float, ...]:
        return tuple((p + m).imag for p, m in zip(self.z_plus, self.z_minus))


def _series_sums(scene: WedgeScene, theta: float, k: int) -> complex:
    # coth(x) = 1 + 2 sum_k e^{-2kx} for Re x > 0
    q = scene.q
    return 2 * sum(sg * np.exp(-2j * k * q * c) for sg, c in _z_terms(scene, theta))


def zn_expansion(scene: WedgeScene, theta: float, nterms: int = 6) -> ZnExpansion:
    """Exact coefficients of the exponential series of Z_N on either side of the core.

    Expanding each coth term geometrically gives every z_k in closed form;
    z_k^- is the complex conjugate of z_k^+ so z_k is real.
    """
    b1 = 4.0 * math.sin(math.pi**2 / scene.Phi)
    zp, zm = [], []
    for k in range(1, nterms + 1):
        if scene.degenerate or abs(b1) < 1e-12:
            zp.append(0j)
            zm.append(0j)
            continue
        s = complex(_series_sums(scene, theta, k))
        zp.append(s / (1j * b1))
        zm.append(s.conjugate() / (1j * b1) * -1)
    return ZnExpansion(theta, scene.q, b1, tuple(zp), tuple(zm))


def z1_closed(scene: WedgeScene, theta: float) -> float:
    r = math.pi / scene.Phi
    return 4 * math.cos(r * (2 * math.pi - theta)) * math.cos(r * (math.pi - scene.alpha))


def z1_plus_closed(scene: WedgeScene, theta: float) -> complex:
    q, a = scene.q, scene.alpha
    return complex(np.exp(2j * q * (math.pi - theta + a)) * (1 + np.exp(4j * q * (math.pi - a))))


def z2_plus_closed(scene: WedgeScene, theta: float) -> complex:
    q, a = scene.q, scene.alpha
    return complex(
        np.exp(2j * q * (math.pi - 2 * theta + 2 * a))
        * (1 + np.exp(8j * q * (math.pi - a)))
        * (1 + np.exp(4j * q * math.pi))
    )


def zn_series_eval(exp: ZnExpansion, beta, terms: int = 6, check_core: bool = True):
    b = np.asarray(beta, dtype=float)
    core = math.log(2.0) / exp.q
    if check_core and np.any(np.abs(b) < core):
        raise ValueError(f"series valid only for |beta| >= ln2/q = {core:.6g}")
    if terms < 1 or terms > len(exp.z_plus):
        raise ValueError("terms out of range")
    out = np.zeros(b.shape, dtype=complex)
    for k in range(1, terms + 1):
        zp, zm = exp.z_plus[k - 1], exp.z_minus[k - 1]
        out += np.where(b >= 0, zp * np.exp(-2 * k * exp.q * np.abs(b)), zm * np.exp(-2 * k * exp.q * np.abs(b)))
    return _out(1j * exp.b1 * out)


def _halfplane_guard(den: np.ndarray) -> None:
    if den.size and np.min(np.abs(den)) < POLE_TOL:
        raise PoleError(complex("nan"), float(np.min(np.abs(den))))


def a_halfplane(alpha: float, beta, theta: float):
    b = np.asarray(beta, dtype=complex)
    t, a = 1j * theta, 1j * alpha
    term1 = np.cosh((b + t) / 2) / (np.sinh((b + t + a) / 2) * np.sinh((b + t - a) / 2))
    term2 = np.cosh((b - t) / 2) / (np.sinh((b - t - a) / 2) * np.sinh((b - t + a) / 2))
    _halfplane_guard(np.concatenate([np.ravel(np.sinh((b + t + a) / 2) * np.sinh((b + t - a) / 2)),
                                     np.ravel(np.sinh((b - t - a) / 2) * np.sinh((b - t + a) / 2))]))
    return _out(-np.sinh(a / 2) / 2 * (term1 + term2))


def b_halfplane(alpha: float, beta, theta: float):
    b = np.asarray(beta, dtype=complex)
    m, p = 1j * (theta - alpha), 1j * (theta + alpha)
    cb = np.cosh(b)
    _halfplane_guard(np.concatenate([np.ravel(cb - np.cosh(m)), np.ravel(cb - np.cosh(p))]))
    return _out((np.sinh(m / 2) / (cb - np.cosh(m)) - np.sinh(p / 2) / (cb - np.cosh(p))) * np.cosh(b / 2))

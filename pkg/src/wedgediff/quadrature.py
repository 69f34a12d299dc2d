"""Adaptive Gauss-Kronrod quadrature on real intervals, half-lines and complex polylines.

All integrands are evaluated vectorised: ``f`` receives a 1-d array of nodes
and must return an array of the same shape.  Panels are refined globally
and the final sum is formed with ``math.fsum`` over panels sorted by their
left endpoint, so results do not depend on evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Integrand = Callable[[np.ndarray], np.ndarray]


class QuadratureError(RuntimeError):
    pass


class DecayError(QuadratureError):
    """The sampled envelope of a semi-infinite integrand did not decay."""


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    decay_cutoff: float | None = None
    max_panels: int = 2**20
    osc_panel_phase: float = math.pi / 4

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not (0 < self.osc_panel_phase <= math.pi / 2):
            raise ValueError("osc_panel_phase must lie in (0, pi/2]")
        if self.max_panels < 1:
            raise ValueError("max_panels must be positive")

    @property
    def cutoff(self) -> float:
        return self.decay_cutoff if self.decay_cutoff is not None else self.abs_tol

    def tightened(self, factor: float) -> "QuadratureSpec":
        return QuadratureSpec(
            self.rel_tol * factor, self.abs_tol * factor, self.decay_cutoff,
            self.max_panels, self.osc_panel_phase,
        )

    def describe(self) -> str:
        return (
            f"rel_tol={self.rel_tol!r};abs_tol={self.abs_tol!r};"
            f"max_panels={self.max_panels};osc_panel_phase={self.osc_panel_phase!r}"
        )


# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
WG = np.zeros(15)
WG[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk_batch(f: Integrand, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=complex).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError("integrand returned non-finite values")
    k = fx @ WK
    g = fx @ WG
    mean = k * 0.5
    resasc = np.abs(fx - mean[:, None]) @ WK
    err = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(resasc > 0, np.minimum(1.0, (200.0 * err / resasc) ** 1.5), 1.0)
    err = np.where(resasc > 0, resasc * scale, err)
    habs = np.abs(half)
    resabs = (np.abs(fx) @ WK) * habs
    eps = np.finfo(float).eps
    floor = 50 * eps * resabs
    return k * half, np.maximum(err * habs, floor), floor


def _fsum_c(vals: Sequence[complex]) -> complex:
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def integrate_panels(f: Integrand, edges: Sequence[float], spec: QuadratureSpec):
    """Adaptive integration over the interval split at ``edges`` (increasing)."""
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return 0j, 0.0
    a = edges[:-1]
    b = edges[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    if a.size == 0:
        return 0j, 0.0
    total_len = float(b[-1] - a[0]) if b[-1] > a[0] else float(np.sum(b - a))
    done_a: list[np.ndarray] = []
    done_v: list[np.ndarray] = []
    done_e: list[np.ndarray] = []
    acc_val = 0j
    acc_err = 0.0
    npanels = a.size
    while a.size:
        if npanels > spec.max_panels:
            raise QuadratureError(f"max_panels={spec.max_panels} exceeded")
        v, e, floor = _gk_batch(f, a, b)
        est = acc_val + v.sum()
        tol = max(spec.abs_tol, spec.rel_tol * abs(est))
        local = tol * (b - a) / total_len
        tiny = (b - a) <= 1e-13 * np.maximum(1.0, np.abs(a) + np.abs(b))
        # panels at their roundoff floor cannot improve under bisection
        ok = (e <= local) | tiny | (e <= floor)
        if not np.any(ok) and e.sum() <= 0.5 * tol:
            ok[:] = True
        done_a.append(a[ok])
        done_v.append(v[ok])
        done_e.append(e[ok])
        acc_val += v[ok].sum()
        acc_err += float(e[ok].sum())
        ra, rb = a[~ok], b[~ok]
        if ra.size and acc_err + e[~ok].sum() <= 0.5 * tol:
            # remaining panels are already good enough globally
            done_a.append(ra)
            done_v.append(v[~ok])
            done_e.append(e[~ok])
            break
        m = 0.5 * (ra + rb)
        a = np.concatenate([ra, m])
        b = np.concatenate([m, rb])
        npanels += ra.size
    aa = np.concatenate(done_a)
    vv = np.concatenate(done_v)
    ee = np.concatenate(done_e)
    order = np.argsort(aa, kind="stable")
    return _fsum_c(vv[order].tolist()), math.fsum(ee[order].tolist())


def integrate_adaptive(f: Integrand, a: float, b: float, spec: QuadratureSpec,
                       points: Sequence[float] = ()):
    """Integral of f over [a, b] (a > b allowed) with optional breakpoints."""
    if a == b:
        return 0j, 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    inner = sorted(p for p in set(points) if a < p < b)
    val, err = integrate_panels(f, [a, *inner, b], spec)
    return sign * val, err


def _walk_envelope(f: Integrand, start: float, direction: float, rate: float,
                   spec: QuadratureSpec, smax: float | None = None) -> tuple[float, float]:
    """Distance s along +/- direction beyond which the tail bound is below the cutoff.

    Returns (s, tail_estimate).  The tail is bounded by |f(s)|/rate assuming
    exponential decay at ``rate`` from the truncation point on.
    """
    step = 0.5
    if smax is None:
        smax = 60.0 / rate + 100.0
    target = spec.cutoff * rate * 0.25
    s = step
    hits = 0
    last = math.inf
    while s <= smax:
        probe = start + direction * np.array([s, s + 0.37 * step, s + 0.71 * step])
        env = np.abs(np.asarray(f(probe), dtype=complex))
        if not np.all(np.isfinite(env)):
            raise DecayError("integrand not finite along the tail")
        m = float(env.max())
        if m <= target:
            hits += 1
            if hits >= 2:
                return s, m / rate
        else:
            hits = 0
        last = m
        s += step
    raise DecayError(f"envelope did not decay below {target:.3g} within {smax:g} (last {last:.3g})")


def integrate_decaying(f: Integrand, decay_rate: float, spec: QuadratureSpec,
                       points: Sequence[float] = (0.0,), center: float = 0.0):
    """Integral over the real line of an exponentially decaying integrand."""
    if not decay_rate > 0:
        raise ValueError("decay_rate must be positive")
    left_pts = [p for p in points if p < center]
    right_pts = [p for p in points if p > center]
    lo = min([center, *left_pts])
    hi = max([center, *right_pts])
    sr, tr = _walk_envelope(f, hi, 1.0, decay_rate, spec)
    sl, tl = _walk_envelope(f, lo, -1.0, decay_rate, spec)
    val, err = integrate_adaptive(f, lo - sl, hi + sr, spec, [center, *points])
    return val, err + tr + tl


def integrate_oscillatory_finite(f: Integrand, a: float, b: float,
                                 local_freq: Callable[[float], float],
                                 spec: QuadratureSpec, points: Sequence[float] = ()):
    """Integral over [a, b] with initial panels bounded by the local phase rate."""
    if a == b:
        return 0j, 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    brk = sorted({a, b, *[p for p in points if a < p < b]})
    edges = [a]
    dphi = spec.osc_panel_phase
    for lo, hi in zip(brk[:-1], brk[1:]):
        x = lo
        while x < hi:
            w = local_freq(x)
            h = hi - x if w <= 0 else min(hi - x, dphi / w)
            w2 = local_freq(min(x + h, hi))
            if w2 > w:
                h = min(h, dphi / w2)
            x = hi if (hi - x - h) <= 1e-12 * (abs(hi) + 1) else x + h
            edges.append(x)
            if len(edges) > spec.max_panels:
                raise QuadratureError("max_panels exceeded while paneling")
    val, err = integrate_panels(f, edges, spec)
    return sign * val, err


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex


@dataclass(frozen=True)
class Ray:
    """Semi-infinite ray anchor + s*direction, s >= 0.

    ``incoming`` rays are traversed from infinity towards the anchor.
    """
    anchor: complex
    direction: complex
    incoming: bool = False


@dataclass(frozen=True)
class ContourPath:
    pieces: tuple = field(default_factory=tuple)
    reversed: bool = False

    def __post_init__(self):
        pcs = self.pieces
        for i, pc in enumerate(pcs):
            if isinstance(pc, Ray):
                if abs(abs(pc.direction) - 1.0) > 1e-12:
                    raise ValueError("ray direction must be a unit complex number")
                if pc.incoming and i != 0 or (not pc.incoming and i != len(pcs) - 1):
                    raise ValueError("rays may only appear at the ends of a path")
        ends = [self._endpoints(pc) for pc in pcs]
        for (_, e0), (s1, _) in zip(ends[:-1], ends[1:]):
            if abs(e0 - s1) > 1e-12 * (1 + abs(e0)):
                raise ValueError("consecutive pieces must share endpoints")

    @staticmethod
    def _endpoints(pc):
        if isinstance(pc, Segment):
            return pc.start, pc.end
        if pc.incoming:
            return None, pc.anchor
        return pc.anchor, None

    def reverse(self) -> "ContourPath":
        return ContourPath(self.pieces, not self.reversed)

    def shifted(self, c: complex) -> "ContourPath":
        return ContourPath(tuple(_map_piece(pc, lambda z: z + c, 1) for pc in self.pieces), self.reversed)

    def negated(self) -> "ContourPath":
        """Image under beta -> -beta, keeping the parameter order."""
        return ContourPath(tuple(_map_piece(pc, lambda z: -z, -1) for pc in self.pieces), self.reversed)

    @classmethod
    def polyline(cls, vertices: Sequence[complex], start_ray: complex | None = None,
                 end_ray: complex | None = None) -> "ContourPath":
        """Polyline through ``vertices``; optional rays leave/enter along unit directions.

        ``start_ray`` is the direction pointing from the first vertex out to
        infinity (the path comes in from there).
        """
        pcs = []
        if start_ray is not None:
            pcs.append(Ray(complex(vertices[0]), complex(start_ray), incoming=True))
        for z0, z1 in zip(vertices[:-1], vertices[1:]):
            pcs.append(Segment(complex(z0), complex(z1)))
        if end_ray is not None:
            pcs.append(Ray(complex(vertices[-1]), complex(end_ray), incoming=False))
        return cls(tuple(pcs))


def _map_piece(pc, fn, dir_factor):
    if isinstance(pc, Segment):
        return Segment(fn(pc.start), fn(pc.end))
    return Ray(fn(pc.anchor), pc.direction * dir_factor, pc.incoming)


def integrate_contour(f: Callable[[np.ndarray], np.ndarray], path: ContourPath,
                      ray_decay: float, spec: QuadratureSpec):
    """Integral of an analytic f along a piecewise-linear path (with end rays)."""
    vals: list[complex] = []
    err = 0.0
    for pc in path.pieces:
        if isinstance(pc, Segment):
            d = pc.end - pc.start
            g = lambda s, z0=pc.start, d=d: f(z0 + s * d) * d
            v, e = integrate_adaptive(g, 0.0, 1.0, spec)
        else:
            g = lambda s, z0=pc.anchor, d=pc.direction: f(z0 + s * d) * d
            smax, tail = _walk_envelope(g, 0.0, 1.0, ray_decay, spec)
            v, e = integrate_adaptive(g, 0.0, smax, spec)
            e += tail
            if pc.incoming:
                v = -v
        vals.append(v)
        err += e
    total = _fsum_c(vals)
    return (-total if path.reversed else total), err

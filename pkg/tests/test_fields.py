import cmath
import math

import numpy as np
import pytest

import oracles
from wedgediff import CriticalRayError, PolarPoint, Profile, QuadratureSpec, derive
from wedgediff.amplitude import a_components
from wedgediff.fields import (
    Representation, j_d, u_d, u_d_with_error, u_hat_d, u_hat_r, u_hat_s, u_in, u_r, u_r_branch, u_s,
    u_total, w_d,
)
from wedgediff.profiles import g_hat
from wedgediff.validation import check_helmholtz

TIGHT = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-15)

# [DERIVED] Heaviside u_d: mpmath quadrature of the defining beta-integral at 20 digits
FROZEN_UD = [
    ((math.pi / 2, math.pi / 4), 1.0, 3.5, 3.0, -0.022783818115750913 - 0.2611706476504109j),
    ((math.pi / 2, math.pi / 4), 0.7, 2.0, 5.0, 0.3321805550824136 - 0.4864319492147852j),
    ((1.0, 0.3), 1.3, 4.0, 6.0, -0.05541699247648494 + 0.08856573628381659j),
    ((0.0, math.pi), 1.0, 2.0, 3.0, -0.02277447822158928 - 0.6065454190025615j),
]


@pytest.mark.parametrize("geom,rho,theta,t,expected", FROZEN_UD)
def test_u_d_frozen(geom, rho, theta, t, expected, heaviside):
    s = derive(*geom)
    v, err = u_d_with_error(s, heaviside, PolarPoint(rho, theta), t, TIGHT)
    assert abs(v - expected) < 1e-11
    assert err < 1e-9


def test_u_d_live_oracle(heaviside):
    s = derive(1.0, 0.3)
    ref = oracles.u_d_heaviside(1.0, 0.3, 0.9, 5.2, 2.4)
    assert abs(u_d(s, heaviside, PolarPoint(0.9, 5.2), 2.4, TIGHT) - ref) < 1e-11


@pytest.mark.parametrize("prof", [Profile.heaviside(), Profile.ramp(0.5)])
def test_causality(ref_scene, prof):
    for rho, th in ((1.0, 3.0), (2.0, 5.5), (0.5, 2.0)):
        for t in (-1.0, 0.0, 0.5 * rho, rho):
            assert u_d(ref_scene, prof, PolarPoint(rho, th), t) == 0


def test_u_d_vanishes_for_phi_pi(heaviside):
    s = derive(math.pi, 0.5)
    for th in (3.5, 4.5, 6.0):
        assert u_d(s, heaviside, PolarPoint(1.2, th), 4.0) == 0


def test_incident_wave_values(ref_scene, ramp):
    p = PolarPoint(2.0, 3.0)
    c = 2.0 * math.cos(3.0 - ref_scene.alpha)
    assert u_in(ref_scene, ramp, p, 5.0) == pytest.approx(cmath.exp(1j * (c - 5.0)))
    assert u_in(ref_scene, ramp, p, c - 0.1) == 0


def test_reflected_sectors(ref_scene, heaviside):
    assert u_r(ref_scene, heaviside, PolarPoint(1.0, math.pi), 5.0) == 0
    v = u_r(ref_scene, heaviside, PolarPoint(1.0, ref_scene.phi + 0.1), 5.0)
    assert abs(v) == pytest.approx(1.0)
    assert abs(u_r(ref_scene, heaviside, PolarPoint(1.0, 6.0), 5.0)) == pytest.approx(1.0)


def test_before_arrival_total_is_incident(ref_scene, ramp):
    for rho, th in ((1.0, 1.7), (2.0, 3.0), (1.5, 5.8)):
        p = PolarPoint(rho, th)
        fv = u_total(ref_scene, ramp, p, -0.3)
        assert fv.u_r == 0 and fv.u_d == 0
        assert fv.value == fv.u_in


def test_total_components_sum(ref_scene, ramp):
    fv = u_total(ref_scene, ramp, PolarPoint(1.0, 2.0), 3.0)
    assert fv.value == fv.u_in + fv.u_r + fv.u_d


@pytest.mark.parametrize("which", ["theta1", "theta2"])
def test_total_continuous_across_critical_rays(ref_scene, ramp, which):
    s = ref_scene
    r = getattr(s, which)
    diffs = []
    for eps in (1e-2, 5e-3, 2.5e-3):
        a = u_total(s, ramp, PolarPoint(1.0, r - eps), 3.0, band=None).value
        b = u_total(s, ramp, PolarPoint(1.0, r + eps), 3.0, band=None).value
        diffs.append(abs(a - b))
    ur_jump = abs(u_r_branch(s, ramp, 1 if which == "theta1" else 2, PolarPoint(1.0, r), 3.0))
    assert ur_jump > 0.5
    assert diffs[-1] < 1e-2
    assert diffs[0] / diffs[1] > 1.8 and diffs[1] / diffs[2] > 1.8


@pytest.mark.parametrize("alpha", [math.pi / 2, math.pi, 4.0])
def test_halfplane_total_continuous(alpha, ramp):
    # the half-plane geometric part: u_in on theta >= alpha, reflection on theta >= theta2
    s = derive(0.0, alpha)
    rays = sorted({r for _, r in s.critical_angles() if 0 < r < 2 * math.pi})
    for r in rays:
        a = u_total(s, ramp, PolarPoint(1.0, r - 2e-3), 3.0, band=None).value
        b = u_total(s, ramp, PolarPoint(1.0, r + 2e-3), 3.0, band=None).value
        assert abs(a - b) < 1e-2


def test_u_s_is_total_minus_incident(hp_scene, ramp):
    for th in (1.0, 2.0, 4.5):
        p = PolarPoint(1.0, th)
        assert abs(u_s(hp_scene, ramp, p, 3.0) - (u_total(hp_scene, ramp, p, 3.0).value - u_in(hp_scene, ramp, p, 3.0))) < 1e-14


def test_critical_ray_rejected(ref_scene, ramp):
    with pytest.raises(CriticalRayError):
        u_d(ref_scene, ramp, PolarPoint(1.0, ref_scene.theta1), 3.0)


def test_origin_bounded_and_continuous(ref_scene, ramp):
    v0 = u_total(ref_scene, ramp, PolarPoint(0.0, 3.0), 2.0).value
    v1 = u_total(ref_scene, ramp, PolarPoint(1e-4, 3.0), 2.0).value
    assert abs(v0) < 10
    assert abs(v1 - v0) < 1e-2


def test_limiting_amplitude_of_u_d(ref_scene, heaviside):
    p = PolarPoint(1.0, 3.5)
    ad = a_components(ref_scene, p).a_d
    v = u_d(ref_scene, heaviside, p, 50.0) * cmath.exp(1j * 50.0)
    assert abs(v - ad) < 1e-3


def test_theta_derivative_matches_difference(ref_scene, ramp):
    p = PolarPoint(1.2, 3.0)
    h = 1e-4
    fd = (u_d(ref_scene, ramp, PolarPoint(1.2, 3.0 + h), 2.5, TIGHT)
          - u_d(ref_scene, ramp, PolarPoint(1.2, 3.0 - h), 2.5, TIGHT)) / (2 * h)
    assert abs(u_d(ref_scene, ramp, p, 2.5, TIGHT, dtheta=1) - fd) < 1e-6


def test_w_d_causal(ref_scene, ramp):
    assert w_d(ref_scene, ramp, PolarPoint(1.0, 3.0), 0.9) == 0
    assert w_d(ref_scene, ramp, PolarPoint(1.0, 3.0), 1.2) != 0
    with pytest.raises(ValueError):
        w_d(ref_scene, Profile.heaviside(), PolarPoint(1.0, 3.0), 2.0)


@pytest.mark.parametrize("w2", [0.1, 1.0, 10.0])
def test_j_d_representations_agree(generic_scene, w2):
    p = PolarPoint(1.1, 3.3)
    w = complex(0.8, w2)
    a = j_d(generic_scene, p, w, Representation.CONTOUR_C0)
    b = j_d(generic_scene, p, w, Representation.REAL_LINE)
    assert abs(a.value - b.value) < max(1e-8, 10 * (a.error_estimate + b.error_estimate))


def test_j_d_boundary_limit(ref_scene):
    p = PolarPoint(1.0, 3.5)
    w1 = 1.3
    real = j_d(ref_scene, p, complex(w1, 0.0)).value
    v = {w2: j_d(ref_scene, p, complex(w1, w2), Representation.CONTOUR_C0).value
         for w2 in (0.1, 0.05, 0.025, 0.0125)}
    # quadratic Richardson extrapolation to w2 = 0 from three halved steps
    ext = lambda h: (8 * v[h / 4] - 6 * v[h / 2] + v[h]) / 3
    e1, e2 = abs(ext(0.1) - real), abs(ext(0.05) - real)
    assert e1 < 2e-4
    assert e1 / e2 > 6
    assert e2 < abs(v[0.0125] - real) / 100


def test_j_d_bounded(ref_scene):
    p = PolarPoint(1.0, 3.5)
    vals = [abs(j_d(ref_scene, p, complex(w1, w2)).value) for w1 in (-3, -1, 0.5, 2, 5) for w2 in (0, 0.5, 3)]
    assert max(vals) < 20


def test_j_d_rejects_wrong_half_plane(ref_scene):
    with pytest.raises(ValueError):
        j_d(ref_scene, PolarPoint(1.0, 3.0), complex(1, -0.1))
    with pytest.raises(ValueError):
        j_d(ref_scene, PolarPoint(1.0, 3.0), complex(1, 0), Representation.CONTOUR_C0)


def test_u_hat_d_routes_and_bound(ref_scene, ramp):
    p = PolarPoint(1.0, 3.5)
    w = complex(0.7, 1.0)
    assert abs(u_hat_d(ref_scene, ramp, p, w, route="g1") - u_hat_d(ref_scene, ramp, p, w, route="direct")) < 1e-8
    prod = [abs(u_hat_d(ref_scene, ramp, p, complex(0.7, w2))) * w2 for w2 in (0.1, 0.3, 1, 3, 10)]
    assert max(prod) < 5 * min(prod[0], 1.0) + 1.0
    with pytest.raises(ValueError):
        u_hat_d(ref_scene, ramp, p, 1.0)


@pytest.mark.parametrize("geom,theta", [((math.pi / 2, math.pi / 4), 3.5), ((math.pi / 2, math.pi / 4), 1.9),
                                        ((1.0, 0.3), 5.9), ((0.0, math.pi), 2.0), ((0.0, 4.0), 5.0)])
def test_u_hat_s_splits(geom, theta, ramp):
    s = derive(*geom)
    p = PolarPoint(1.1, theta)
    w = complex(0.6, 1.0)
    d = u_hat_s(s, ramp, p, w) - u_hat_r(s, ramp, p, w)
    if s.is_halfplane and theta < s.alpha:
        d += g_hat(ramp, 1.0, w) * cmath.exp(1j * w * p.rho * math.cos(theta - s.alpha))
    assert abs(d - u_hat_d(s, ramp, p, w)) < 1e-8


def test_u_hat_s_helmholtz(ref_scene, ramp):
    w = complex(0.6, 1.0)
    rep = check_helmholtz("u_hat_s", lambda r, th: u_hat_s(ref_scene, ramp, PolarPoint(r, th), w),
                          PolarPoint(1.2, 3.3), w, h0=0.05)
    assert rep.passed, rep.line()

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wedgediff import ConfigError, CriticalRayError, PolarPoint, Sector, ac, classify, derive
from wedgediff.geometry import require_noncritical


def test_derive_reference():
    s = derive(math.pi / 2, math.pi / 4, 1.0)
    assert s.Phi == pytest.approx(3 * math.pi / 2)
    assert s.q == pytest.approx(1 / 3)
    assert s.theta1 == pytest.approx(3 * math.pi / 4)
    assert s.theta2 == pytest.approx(7 * math.pi / 4)
    assert s.admissible


def test_derive_halfplane_reduces_theta1():
    s = derive(0.0, math.pi, 1.0)
    assert s.Phi == pytest.approx(2 * math.pi)
    assert s.q == pytest.approx(0.25)
    assert s.theta1 == pytest.approx(math.pi)
    assert s.theta2 == pytest.approx(math.pi)
    assert s.is_halfplane


def test_non_admissible_flagged():
    assert not derive(math.pi / 2, 3 * math.pi / 4).admissible


@pytest.mark.parametrize("phi,omega0", [(-0.1, 1.0), (3.5, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_derive_rejects(phi, omega0):
    with pytest.raises(ConfigError):
        derive(phi, 0.3, omega0)


def test_degenerate_flag():
    assert derive(math.pi, 0.5).degenerate


def test_classify_examples(ref_scene):
    assert classify(ref_scene, math.pi, 1e-3) is Sector.II
    assert classify(ref_scene, ref_scene.theta1, 1e-3) is Sector.CRITICAL1
    assert classify(ref_scene, ref_scene.theta2 + 5e-4, 1e-3) is Sector.CRITICAL2
    assert classify(ref_scene, 2 * math.pi, 1e-3) is Sector.III
    assert classify(ref_scene, ref_scene.phi, 1e-3) is Sector.I


def test_classify_rejects_outside(ref_scene):
    with pytest.raises(ConfigError):
        classify(ref_scene, 0.5)
    with pytest.raises(ConfigError):
        classify(ref_scene, 7.0)


def test_require_noncritical(ref_scene):
    with pytest.raises(CriticalRayError):
        require_noncritical(ref_scene, ref_scene.theta1 + 1e-8)
    assert require_noncritical(ref_scene, 3.0) is Sector.II


def test_halfplane_shadow_ray_is_critical():
    s = derive(0.0, 1.6 * math.pi)
    rays = [r for _, r in s.critical_angles()]
    assert any(abs(r - 1.6 * math.pi) < 1e-12 for r in rays)


@pytest.mark.parametrize("x,expected", [(0.5, 0.0), (1.0, 0.0), (2.0, 1.3169578969248166)])
def test_ac_examples(x, expected):
    assert ac(x) == pytest.approx(expected, abs=1e-15)


@given(st.floats(1.0, 1e8))
def test_ac_inverts_cosh(x):
    assert math.cosh(ac(x)) == pytest.approx(x, rel=1e-12)


def test_ac_monotone_and_vectorized():
    xs = np.linspace(-2, 50, 1001)
    v = ac(xs)
    assert np.all(np.diff(v) >= 0)
    assert isinstance(ac(3.0), float)


@given(st.floats(0.0, math.pi * 0.999), st.floats(-7, 7))
def test_scene_invariants(phi, alpha):
    s = derive(phi, alpha)
    assert s.q * s.Phi == pytest.approx(math.pi / 2)
    assert 0.25 <= s.q < 0.5 + 1e-12
    if s.admissible:
        assert s.theta1 < s.theta2
        assert s.theta2 - s.theta1 == pytest.approx(2 * math.pi - 2 * phi)
        assert phi <= s.theta1 <= 2 * math.pi and phi <= s.theta2 <= 2 * math.pi


def test_polar_point():
    p = PolarPoint(2.0, math.pi / 2)
    x, y = p.xy
    assert x == pytest.approx(0.0, abs=1e-15) and y == pytest.approx(2.0)
    with pytest.raises(ConfigError):
        PolarPoint(-1.0, 3.0)

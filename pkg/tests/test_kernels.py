import math

import mpmath as mp
import numpy as np
import pytest

import oracles
from wedgediff import derive
from wedgediff.geometry import CriticalRayError
from wedgediff.kernels import (
    PoleError, a_halfplane, b_halfplane, h_dd, h_dn, h_nn, poles, z1_closed, z1_plus_closed,
    z2_plus_closed, z_nn, zn_expansion, zn_series_eval,
)

SCENES = [(math.pi / 2, math.pi / 4), (1.0, 0.3), (0.4, 2.0), (0.0, math.pi), (0.0, 4.0)]


def _rand_beta(n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-4, 4, n) + 1j * rng.uniform(-8, 8, n)


@pytest.mark.parametrize("phi,alpha", SCENES)
def test_hn_symmetries(phi, alpha):
    s = derive(phi, alpha)
    b = _rand_beta(50)
    h = h_nn(s, b)
    scale = np.maximum(np.abs(h), 1)
    assert np.max(np.abs(h_nn(s, -b + 1j * math.pi) + h) / scale) < 1e-10
    assert np.max(np.abs(h_nn(s, b + 2j * s.Phi) - h) / scale) < 1e-10


@pytest.mark.parametrize("phi,alpha", SCENES)
def test_hn_against_mpmath(phi, alpha):
    s = derive(phi, alpha)
    for b in _rand_beta(10, 1):
        ref = complex(oracles.h_nn(mp.mpf(phi), mp.mpf(alpha), mp.mpc(b)))
        assert abs(h_nn(s, b) - ref) <= 1e-12 * max(1, abs(ref))


def test_hn_far_field(ref_scene):
    assert h_nn(ref_scene, 80.0) == pytest.approx(2.0, abs=1e-14)
    assert h_nn(ref_scene, 1e4 + 0.3j) == pytest.approx(2.0, abs=1e-14)


def test_dd_dn(ref_scene):
    s = ref_scene
    b = _rand_beta(30, 2)
    c = np.array([complex(mp.coth(s.q * (mp.mpc(x) + 1j * math.pi / 2 - 1j * s.alpha))) for x in b])
    assert np.max(np.abs(h_dd(s, b) + h_nn(s, b) - 2 * c) / np.maximum(np.abs(c), 1)) < 1e-10
    assert abs(h_dd(s, 60.0)) < 1e-12
    v = np.abs([h_dn(s, x) for x in (5.0, 10.0, 15.0)])
    sl = np.polyfit([5, 10, 15], np.log(v), 1)[0]
    assert sl < -0.9 * s.q


def test_pole_rejected(ref_scene):
    lat = poles(ref_scene, 3.0, (-1, 1, -20, 20))
    with pytest.raises(PoleError):
        h_nn(ref_scene, lat.poles[0] + 3j + 1e-11)


@pytest.mark.parametrize("phi,alpha", SCENES[:3])
def test_z_nn_against_mpmath(phi, alpha):
    s = derive(phi, alpha)
    th = 0.5 * (s.theta1 + s.theta2) + 0.1
    for b in (-7.0, -1.3, 0.2, 2.5, 9.0):
        ref = complex(oracles.z_nn(mp.mpf(phi), mp.mpf(alpha), mp.mpf(b), mp.mpf(th)))
        assert abs(z_nn(s, b, th) - ref) <= 1e-13 * max(1, abs(ref))


def test_z_nn_tail_relative_accuracy(generic_scene):
    # the constant parts cancel; far tails keep full relative accuracy
    th = 3.0
    for b in (30.0, 60.0):
        mp.mp.dps = 40
        ref = complex(oracles.z_nn(mp.mpf(1.0), mp.mpf(0.3), mp.mpf(b), mp.mpf(th)))
        mp.mp.dps = 20
        assert abs(z_nn(generic_scene, b, th) - ref) <= 1e-10 * abs(ref)


def test_z_nn_band(ref_scene):
    with pytest.raises(CriticalRayError):
        z_nn(ref_scene, 0.3, ref_scene.theta2 + 1e-9)


@pytest.mark.parametrize("phi,alpha,theta", [(1.0, 0.3, 4.0), (0.4, 2.0, 3.0), (0.2, 0.7, 5.5)])
def test_z_nn_decay_generic(phi, alpha, theta):
    s = derive(phi, alpha)
    bs = np.linspace(5, 15, 21)
    for sign in (1, -1):
        v = np.abs(z_nn(s, sign * bs, theta))
        sl = np.polyfit(bs, np.log(v), 1)[0]
        assert abs(sl + 2 * s.q) <= 0.02 * 2 * s.q


def test_z_nn_decay_reference_is_faster(ref_scene):
    # symmetric incidence: the e^{-2q|b|} coefficient vanishes and the decay is e^{-4q|b|}
    bs = np.linspace(5, 15, 21)
    v = np.abs(z_nn(ref_scene, bs, 3.7))
    sl = np.polyfit(bs, np.log(v), 1)[0]
    assert sl <= -2 * ref_scene.q * 0.99
    assert sl == pytest.approx(-4 * ref_scene.q, rel=0.02)


def test_z_nn_vanishes_for_phi_pi():
    s = derive(math.pi, 0.4)
    rng = np.random.default_rng(5)
    for _ in range(20):
        assert abs(z_nn(s, rng.uniform(-5, 5), rng.uniform(math.pi + 0.01, 2 * math.pi), band=None)) < 1e-12


def test_halfplane_z_is_four_a():
    rng = np.random.default_rng(11)
    for _ in range(100):
        th0 = rng.uniform(math.pi / 2, math.pi - 0.05)
        alpha = th0 + math.pi
        th = rng.uniform(alpha + 0.02, 2 * math.pi)
        b = complex(rng.uniform(-3, 3), rng.uniform(-0.3, 0.3))
        s = derive(0.0, alpha)
        even = 0.5 * (z_nn(s, b, th, band=None) + z_nn(s, -b, th, band=None))
        a = a_halfplane(alpha, b, th)
        assert abs(even - 4 * a) <= 1e-11 * max(1, abs(a))


def test_halfplane_a_equals_b_and_even():
    rng = np.random.default_rng(12)
    for _ in range(100):
        th0 = rng.uniform(math.pi / 2, math.pi - 0.05)
        alpha = th0 + math.pi
        th = rng.uniform(alpha + 0.02, 2 * math.pi)
        b = complex(rng.uniform(-4, 4), rng.uniform(-0.3, 0.3))
        a = a_halfplane(alpha, b, th)
        assert abs(a - b_halfplane(alpha, b, th)) <= 1e-11 * max(1, abs(a))
        assert abs(a - a_halfplane(alpha, -b, th)) <= 1e-11 * max(1, abs(a))


def test_halfplane_a_growth():
    alpha, th = 1.7 * math.pi, 1.9 * math.pi
    bs = np.linspace(5, 15, 11)
    sl = np.polyfit(bs, np.log(np.abs(a_halfplane(alpha, bs, th))), 1)[0]
    assert sl <= 0.5 + 1e-6


def test_poles_membership(ref_scene):
    s = ref_scene
    win = (-1, 1, -20, 20)
    assert -0.5j * math.pi in poles(s, s.theta2, win)
    assert -2.5j * math.pi in poles(s, s.theta1, win)
    assert -0.5j * math.pi not in poles(s, 3.5, win)
    for p in poles(s, 3.5, win).poles:
        b = p + 1j * 3.5 + 1e-8
        assert abs(h_nn(s, b)) > 1e6


def test_poles_match_sampling(generic_scene):
    # brute force: zeros of the two coth denominators along the imaginary axis
    s, th = generic_scene, 3.1
    ys = np.linspace(-12, 12, 240001)
    lat = poles(s, th, (-1, 1, -12, 12))
    den = []
    for y in ys:
        den.append(abs(math.sin(s.q * (y + th + math.pi / 2 - s.alpha))) * abs(math.sin(s.q * (y + th - 1.5 * math.pi + s.alpha))))
    den = np.array(den)
    yy = ys
    mins = yy[1:-1][(den[1:-1] < den[:-2]) & (den[1:-1] < den[2:]) & (den[1:-1] < 1e-3)]
    assert len(mins) == len(lat.poles)
    assert np.allclose(np.sort(mins), np.sort([p.imag for p in lat.poles]), atol=2e-4)


def test_b1_and_z1_halfplane(hp_scene):
    ex = zn_expansion(hp_scene, 2.0)
    assert ex.b1 == pytest.approx(4.0)
    assert ex.z[0] == pytest.approx(-4 * math.cos(1.0), abs=1e-14)
    assert z1_closed(hp_scene, 2.0) == pytest.approx(-4 * math.cos(1.0), abs=1e-14)
    assert all(abs(z) < 1e-13 for z in ex.z[1::2])


@pytest.mark.parametrize("phi,alpha,theta", [(1.0, 0.3, 4.0), (0.4, 2.0, 3.0), (math.pi / 2, math.pi / 4, 3.7)])
def test_expansion_coefficients(phi, alpha, theta):
    s = derive(phi, alpha)
    ex = zn_expansion(s, theta)
    ref = oracles.z_series_coeffs(mp.mpf(phi), mp.mpf(alpha), mp.mpf(theta), 6)
    for k in range(6):
        assert abs(1j * ex.b1 * ex.z_plus[k] - complex(ref[k])) < 1e-12
    assert ex.z[0] == pytest.approx(z1_closed(s, theta), abs=1e-12)
    assert all(abs(z) < 1e-12 for z in ex.z_imag)
    # closed forms of the two leading +-coefficients
    assert abs(complex(ref[0]) - 1j * ex.b1 * z1_plus_closed(s, theta)) < 1e-12
    assert abs(complex(ref[1]) - 1j * ex.b1 * z2_plus_closed(s, theta)) < 1e-12


@pytest.mark.parametrize("phi,alpha,theta", [(1.0, 0.3, 4.0), (math.pi / 2, math.pi / 4, 3.7)])
def test_series_remainder_exponent(phi, alpha, theta):
    # Z_N minus six terms, in extended precision, against the package's coefficients
    s = derive(phi, alpha)
    ex = zn_expansion(s, theta)
    core = math.log(2) / s.q
    bs = np.linspace(core + 2, core + 10, 9)
    mp.mp.dps = 50
    try:
        rem = []
        for b in bs:
            z = oracles.z_nn(mp.mpf(phi), mp.mpf(alpha), mp.mpf(b), mp.mpf(theta))
            ser = sum(mp.mpc(1j * ex.b1 * ex.z_plus[k]) * mp.exp(-2 * (k + 1) * s.q * mp.mpf(b)) for k in range(6))
            rem.append(float(abs(z - ser)))
    finally:
        mp.mp.dps = 20
    # keep points above the rounding level of the double coefficients
    floor = [1e-15 * math.exp(-2 * s.q * b) * 40 for b in bs]
    keep = [i for i in range(len(bs)) if rem[i] > 10 * floor[i]]
    assert len(keep) >= 3
    sl = np.polyfit(bs[keep], np.log(np.array(rem)[keep]), 1)[0]
    assert sl <= -14 * s.q * 0.95


def test_series_remainder_exponent_exact_coefficients():
    # same fit over the whole range with coefficients from the extended-precision oracle
    phi, alpha, theta = 1.0, 0.3, 4.0
    q = math.pi / (2 * (2 * math.pi - phi))
    core = math.log(2) / q
    bs = np.linspace(core + 2, core + 10, 9)
    mp.mp.dps = 50
    try:
        q = mp.pi / (2 * (2 * mp.pi - phi))
        c = oracles.z_series_coeffs(mp.mpf(phi), mp.mpf(alpha), mp.mpf(theta), 6)
        rem = [float(abs(oracles.z_nn(mp.mpf(phi), mp.mpf(alpha), mp.mpf(b), mp.mpf(theta))
                         - sum(c[k] * mp.exp(-2 * (k + 1) * q * mp.mpf(b)) for k in range(6)))) for b in bs]
    finally:
        mp.mp.dps = 20
    sl = np.polyfit(bs, np.log(rem), 1)[0]
    assert sl <= -14 * float(q) * 0.95


def test_series_eval_core_and_one_term(generic_scene):
    s, th = generic_scene, 4.0
    ex = zn_expansion(s, th)
    with pytest.raises(ValueError):
        zn_series_eval(ex, 0.5)
    bs = np.array([6.0, 8.0, 10.0])
    r1 = np.abs(z_nn(s, bs, th) - zn_series_eval(ex, bs, 1))
    sl = np.polyfit(bs, np.log(r1), 1)[0]
    assert sl == pytest.approx(-4 * s.q, rel=0.05)
    rn = np.abs(z_nn(s, -bs, th) - zn_series_eval(ex, -bs, 2))
    assert np.all(rn < r1)

import math

import numpy as np
import pytest
from _systems import grid_peak, random_system

from rir.errors import CancellationError, NotProper, PoleOnAxis, ZeroDenominator
from rir.poly import Polynomial
from rir.second_order import example_family
from rir.xfer import (
    RationalTF,
    complementary,
    eval_jw,
    from_coeffs,
    linf_norm,
    nyquist,
    pip_holds,
    static_gain,
    unstable_poles,
)


def h_of(z):
    return from_coeffs([-2.0 * z, 2.0], [-2.0, 1.0, 1.0])


# construction


def test_from_coeffs_family_member():
    h = h_of(-3.0)
    assert h.num == Polynomial([6.0, 2.0])
    assert h.den == Polynomial([-2.0, 1.0, 1.0])
    assert not h.near_cancellation


def test_from_coeffs_constant():
    g = from_coeffs([1.0], [1.0])
    assert g(5.0) == 1.0
    assert g.relative_degree == 0


def test_from_coeffs_cancellation():
    with pytest.raises(CancellationError):
        from_coeffs([-1.0, 1.0], [-1.0, 1.0])


def test_from_coeffs_near_cancellation_flag():
    g = from_coeffs([-1.0, 1.0], [-(1.0 + 5e-8), 1.0])
    assert g.near_cancellation


def test_zero_denominator():
    with pytest.raises(ZeroDenominator):
        from_coeffs([1.0], [0.0, 0.0])


def test_complementary():
    g = complementary(h_of(5.0))
    assert g.num == Polynomial([-10.0, 2.0])
    assert g.den == Polynomial([8.0, -1.0, 1.0])
    assert complementary(from_coeffs([0.0], [1.0, 1.0])).num.is_zero()
    g = complementary(from_coeffs([1.0], [1.0, 1.0]))
    assert g.den == Polynomial([0.0, 1.0])


def test_complementary_matches_family():
    for z in (-3.0, -0.5, 1.5, 5.0):
        assert complementary(h_of(z)) == example_family(z).g


# evaluation


def test_eval_jw_examples():
    assert eval_jw(from_coeffs([1.0], [-1.0, 1.0]), 0.0) == pytest.approx(-1.0)
    assert abs(eval_jw(example_family(-3.0).g, 0.0)) == pytest.approx(0.75)
    # near the tabulated peak frequency of the z = 5 member
    assert abs(eval_jw(example_family(5.0).g, 2.76)) == pytest.approx(1 / 0.244, rel=5e-3)


def test_eval_jw_on_pole():
    with pytest.raises(PoleOnAxis):
        eval_jw(from_coeffs([1.0], [1.0, 0.0, 1.0]), 1.0)


# static gain, poles, PIP


def test_static_gain():
    assert static_gain(example_family(-0.5).g) == pytest.approx(-1 / 3)
    assert static_gain(from_coeffs([1.0], [-1.0, 1.0])) == -1.0
    assert static_gain(example_family(-3.0).g) == pytest.approx(-0.75)


def test_unstable_poles():
    up = sorted(unstable_poles(example_family(5.0).g), key=lambda p: p.imag)
    w = math.sqrt(31.0) / 2
    assert np.allclose(up, [0.5 - 1j * w, 0.5 + 1j * w])
    assert np.allclose(unstable_poles(from_coeffs([1.0], [-1.0, 1.0])), [1.0])
    assert unstable_poles(from_coeffs([1.0], [1.0, 1.0])) == []


def test_pip_examples():
    assert not pip_holds(example_family(0.5).g)
    assert pip_holds(from_coeffs([1.0], [-1.0, 1.0]))
    assert pip_holds(example_family(1.5).g)


def test_pip_counts_infinite_zero_for_strictly_proper_only():
    # zero at 1, real unstable pole at 2: odd count between 1 and infinity
    assert not pip_holds(from_coeffs([-1.0, 1.0], [-6.0, 1.0, 1.0]))
    # biproper: no zero at infinity, nothing to interlace
    assert pip_holds(from_coeffs([-1.0, 1.0], [-2.0, 1.0]))


def test_pip_scaling_invariance():
    rng = np.random.default_rng(7)
    for _ in range(200):
        g = random_system(rng)
        k = rng.uniform(0.01, 100.0)
        assert pip_holds(g) == pip_holds(g * k)


# L-infinity norm


def test_linf_examples():
    n = linf_norm(example_family(-3.0).g)
    assert n.norm == pytest.approx(0.75) and n.w_peak == 0.0
    n = linf_norm(example_family(-0.5).g)
    assert 1 / n.norm == pytest.approx(1.725, abs=5e-4)
    assert n.w_peak == pytest.approx(1.57, abs=5e-3)
    n = linf_norm(from_coeffs([1.0], [-1.0, 1.0]))
    assert n == (1.0, 0.0)


def test_linf_biproper_peak_at_infinity():
    n = linf_norm(from_coeffs([1.0, 2.0], [1.0, 1.0]))
    assert n.norm == pytest.approx(2.0)
    assert n.at_infinity


def test_linf_rejects_bad_input():
    with pytest.raises(PoleOnAxis):
        linf_norm(from_coeffs([1.0], [1.0, 0.0, 1.0]))
    with pytest.raises(NotProper):
        linf_norm(from_coeffs([0.0, 0.0, 1.0], [1.0, 1.0]))


def test_linf_supremum_property():
    rng = np.random.default_rng(11)
    for _ in range(100):
        g = random_system(rng, unstable=False)
        nrm = linf_norm(g).norm
        ws = rng.exponential(3.0, size=1000)
        assert grid_peak(g, ws) <= nrm * (1 + 1e-12)


def test_linf_scaling():
    rng = np.random.default_rng(12)
    for _ in range(100):
        g = random_system(rng)
        k = rng.uniform(-5, 5)
        if abs(k) < 1e-3:
            continue
        a, b = linf_norm(g), linf_norm(g * k)
        assert b.norm == pytest.approx(abs(k) * a.norm, rel=1e-12)
        assert b.w_peak == pytest.approx(a.w_peak, rel=1e-12)


def test_linf_matches_dense_grid_small_sample():
    rng = np.random.default_rng(13)
    ws = np.logspace(-4, 4, 200_000)
    for _ in range(20):
        g = random_system(rng, unstable=False)
        ref = grid_peak(g, ws)
        assert linf_norm(g).norm == pytest.approx(ref, rel=1e-5)


# Nyquist data


def test_nyquist_minus_phi_at_dc():
    z = -3.0
    h = example_family(z).h
    f = RationalTF(-h.den, h.num)
    curve = nyquist(f, 0.0, 100.0, 501)
    assert curve.freqs[0] == 0.0
    assert curve.points[0] == pytest.approx(-1 / z)


def test_nyquist_constant():
    c = nyquist(from_coeffs([2.0], [1.0]), 0.0, 10.0, 11)
    assert np.all(c.points == 2.0)


def test_nyquist_endpoints_and_projection():
    g = example_family(5.0).g
    f = RationalTF(g.den, g.num)
    c = nyquist(f, 0.1, 50.0, 300, scale="log", g=g)
    assert c.freqs[0] == 0.1 and c.freqs[-1] == 50.0
    assert c.points[0] == pytest.approx(eval_jw(f, 0.1))
    assert c.points[-1] == pytest.approx(eval_jw(f, 50.0))
    assert np.all(np.diff(c.freqs) > 0)
    assert c.projection.radius == pytest.approx(0.244, abs=5e-4)
    assert abs(c.projection.point) == pytest.approx(c.projection.radius)


def test_nyquist_skips_pole_samples():
    c = nyquist(from_coeffs([1.0], [1.0, 0.0, 1.0]), 0.0, 2.0, 3)
    assert c.skipped == [1.0]
    assert list(c.freqs) == [0.0, 2.0]


def test_nyquist_csv_format():
    c = nyquist(from_coeffs([1.0], [1.0, 1.0]), 0.0, 1.0, 3)
    lines = c.to_csv().splitlines()
    assert lines[0] == "omega,re,im"
    assert lines[1] == "0,1,0"
    assert lines[2] == "0.5,0.8,-0.4"

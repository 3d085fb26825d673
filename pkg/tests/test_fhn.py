import json
import math

import numpy as np
import pytest

from rir import fhn
from rir.errors import NonUnique
from rir.poly import is_hurwitz
from rir.xfer import linf_norm

M = fhn.NOMINAL


def test_model_validation():
    with pytest.raises(ValueError):
        fhn.FHNModel(beta=1.2)
    with pytest.raises(ValueError):
        fhn.FHNModel(tau=0.0)


def test_nominal_equilibrium():
    eq = fhn.equilibrium(M, 0.0)
    assert max(map(abs, fhn.residuals(M, eq))) <= 1e-10
    assert not eq.stable
    # instability comes from beta c < tau gamma
    assert M.beta * M.c < M.tau * eq.gamma


def test_shifted_equilibrium_is_stable():
    assert fhn.equilibrium(M, -0.2).stable


def test_non_unique_below_guard():
    with pytest.raises(NonUnique):
        fhn.equilibrium(M, M.beta - 1 - 1e-3)


def test_residuals_over_sweep():
    for e in np.linspace(M.beta - 1, 0.0, 101):
        eq = fhn.equilibrium(M, float(e))
        assert max(map(abs, fhn.residuals(M, eq))) <= 1e-10


def test_nominal_linearization_radius():
    g = fhn.linearize(M, fhn.equilibrium(M, 0.0))
    assert 1 / linf_norm(g).norm == pytest.approx(0.283, abs=2e-3)


def test_zero_gamma_linearization_is_stable():
    eq = fhn.Equilibrium(v_bar=1.0, w_bar=0.0, e=0.0, gamma=0.0, stable=True)
    g = fhn.linearize(M, eq)
    assert list(g.den.coeffs) == [1.0, M.beta * M.c, M.c * M.tau]
    assert is_hurwitz(g.den)


def test_critical_gain():
    e0, w_p = fhn.critical_static_gain(M)
    assert e0 == pytest.approx(-0.118, abs=2e-3)
    assert w_p == pytest.approx(0.299, abs=5e-3)
    g = fhn.linearize(M, fhn.equilibrium(M, e0))
    assert abs(e0) == pytest.approx(1 / linf_norm(g).norm, rel=1e-9)


def test_critical_gain_minimizes_max_radius():
    e0, _ = fhn.critical_static_gain(M)
    es = np.linspace(M.beta - 1 + 1e-6, 0.0, 200)
    vals = [max(abs(e), fhn.peak_radius(M, float(e))) for e in es]
    spacing = es[1] - es[0]
    assert abs(es[int(np.argmin(vals))] - e0) <= spacing


def test_synthesized_perturbations():
    d0 = fhn.synthesize_perturbation(M, 0.0)
    assert d0.a == pytest.approx(0.320, abs=5e-3)
    d = fhn.synthesize_perturbation(M, 0.1)
    assert d.hinf_norm == pytest.approx(0.130, abs=2e-3)
    assert d.dc_gain == pytest.approx(-0.130, abs=2e-3)
    assert d.dc_gain == 1.1 * d0.b
    d = fhn.synthesize_perturbation(M, -0.1)
    assert d.hinf_norm == pytest.approx(0.9 * 0.118, abs=2e-3)
    assert d.hinf_norm < abs(fhn.critical_static_gain(M).e0)


def test_nominal_spikes_at_short_horizon():
    tr = fhn.simulate(M, None, t_end=200.0)
    assert tr.outcome == "limit_cycle"
    assert tr.period == pytest.approx(36.2, abs=0.5)


def start_near(delta):
    e = 0.0 if delta is None else (delta if isinstance(delta, float) else delta.dc_gain)
    eq = fhn.equilibrium(M, e)
    x = 0.0 if not isinstance(delta, fhn.AllPassPerturbation) else eq.w_bar / delta.a
    return eq, (eq.v_bar + 5e-4, eq.w_bar, x)


@pytest.mark.parametrize(
    "kind, value",
    [("const", -0.2), ("const", -0.1), ("allpass", 0.2), ("allpass", -0.2)],
)
def test_linear_nonlinear_consistency(kind, value):
    delta = value if kind == "const" else fhn.synthesize_perturbation(M, value)
    eq, x0 = start_near(delta)
    tr = fhn.simulate(M, delta, x0=x0, t_end=4000.0)
    expected = "converged" if fhn.closed_loop_stable(M, delta) else "limit_cycle"
    assert tr.outcome == expected
    if expected == "converged":
        assert abs(tr.states[-1, 0] - eq.v_bar) <= 1e-3
        assert abs(tr.states[-1, 1] - eq.w_bar) <= 1e-3


def test_dt_halving_on_converged_run():
    a = fhn.simulate(M, -0.2, t_end=2000.0, dt=0.01)
    b = fhn.simulate(M, -0.2, t_end=2000.0, dt=0.005)
    assert a.outcome == b.outcome == "converged"
    assert np.max(np.abs(a.states[-1] - b.states[-1])) <= 1e-6


def test_trajectory_outputs():
    tr = fhn.simulate(M, None, t_end=1.0, dt=0.5)
    lines = tr.to_csv().splitlines()
    assert lines[0] == "t,v,w,x"
    assert len(lines) == 1 + len(tr.times) == 4
    summary = json.loads(tr.to_json())
    assert summary["thresholds"]["settle_band"] == fhn.SETTLE_BAND
    assert summary["outcome"] in ("converged", "limit_cycle", "undecided")
    assert len(tr.times) == len(tr.states)


def test_simulate_rejects_bad_step():
    with pytest.raises(ValueError):
        fhn.simulate(M, None, t_end=1.0, dt=0.0)


def test_closed_loop_stable_matches_equilibrium_flag():
    assert fhn.closed_loop_stable(M, None) == fhn.equilibrium(M, 0.0).stable
    assert fhn.closed_loop_stable(M, fhn.synthesize_perturbation(M, 0.1))
    assert not fhn.closed_loop_stable(M, fhn.synthesize_perturbation(M, -0.1))
    assert math.isfinite(fhn.peak_radius(M, -0.1))

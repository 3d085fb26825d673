"""FitzHugh-Nagumo case study.

The perturbed model is

    c v' = psi(v) - (1 + delta(s)) w,    tau w' = v + alpha - beta w,
    psi(v) = v - v^3/3 + i.

A perturbation with DC gain ``e = delta(0)`` moves the equilibrium, so every
linear question is asked of the linearization ``g_e`` at the shifted point.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from .allpass import AllPassPerturbation, closed_loop_poly, solve_marginal
from .errors import NoCrossing, NonFinite, NonUnique, NoRealRoot, PoleOnAxis
from .poly import TAU_STAB, Polynomial, is_hurwitz
from .xfer import RationalTF, fmt9, linf_norm

# classification thresholds, recorded on every Trajectory
SETTLE_BAND = 1e-3
SETTLE_FRACTION = 0.2
CYCLE_AMPLITUDE = 0.5
CYCLE_WINDOW = 0.5
PERIOD_AGREEMENT = 0.05


@dataclass(frozen=True)
class FHNModel:
    c: float = 1.0
    tau: float = 10.0
    alpha: float = 0.7
    beta: float = 0.8
    i: float = 0.4

    def __post_init__(self):
        if min(self.c, self.tau, self.alpha, self.beta) <= 0:
            raise ValueError("c, tau, alpha, beta must be positive")
        if self.beta >= 1:
            raise ValueError("beta < 1 is required for a unique nominal equilibrium")

    def psi(self, v: float) -> float:
        return v - v**3 / 3 + self.i


NOMINAL = FHNModel()


@dataclass(frozen=True)
class Equilibrium:
    v_bar: float
    w_bar: float
    e: float
    gamma: float
    stable: bool


def equilibrium(m: FHNModel, e: float = 0.0) -> Equilibrium:
    """Equilibrium under a perturbation with DC gain ``e``.

    With ``w = (v + alpha)/beta`` the condition ``psi(v) = (1 + e) w`` is a
    cubic in ``v`` that is strictly decreasing when ``1 + e >= beta`` (at
    equality the linear term vanishes and ``-v^3/3`` alone is monotone).
    """
    if 1 + e < m.beta:
        raise NonUnique(f"1 + e = {1 + e:g} < beta = {m.beta:g}")
    k = (1 + e) / m.beta
    cubic = Polynomial([m.i - k * m.alpha, 1 - k, 0.0, -1.0 / 3.0])
    real = [r.real for r in cubic.roots() if abs(r.imag) < 1e-7 * (1 + abs(r.real))]
    if not real:
        raise NoRealRoot("equilibrium cubic has no real root")
    v = real[0]
    dcubic = cubic.derivative()
    for _ in range(3):
        v -= cubic(v) / dcubic(v)
    w = (v + m.alpha) / m.beta
    gamma = 1 - v * v
    den = _linear_den(m, gamma)
    return Equilibrium(v, w, e, gamma, is_hurwitz(den))


def residuals(m: FHNModel, eq: Equilibrium) -> tuple[float, float]:
    return (m.psi(eq.v_bar) - (1 + eq.e) * eq.w_bar, eq.v_bar - (m.beta * eq.w_bar - m.alpha))


def _linear_den(m: FHNModel, gamma: float) -> Polynomial:
    return Polynomial([1 - m.beta * gamma, m.beta * m.c - m.tau * gamma, m.c * m.tau])


def linearize(m: FHNModel, eq: Equilibrium) -> RationalTF:
    """``g_e(s) = -1 / (c tau s^2 + (beta c - tau gamma) s + 1 - beta gamma)``."""
    return RationalTF(Polynomial([-1.0]), _linear_den(m, eq.gamma))


def peak_radius(m: FHNModel, e: float) -> float:
    """``1/||g_e||_Linf``; zero when ``g_e`` has an imaginary-axis pole."""
    try:
        return 1.0 / linf_norm(linearize(m, equilibrium(m, e))).norm
    except PoleOnAxis:
        return 0.0


class CriticalGain(NamedTuple):
    e0: float
    omega_p: float


def critical_static_gain(m: FHNModel = NOMINAL) -> CriticalGain:
    """Solve ``|e| = 1/||g_e||_Linf`` for ``e`` in ``(beta - 1, 0)``."""
    lo, hi = -(1 - m.beta) + 1e-6, 0.0

    def f(e):
        return abs(e) - peak_radius(m, e)

    if f(lo) * f(hi) > 0:
        raise NoCrossing("|e| - 1/||g_e|| does not change sign on the bracket")
    e0 = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    if abs(f(e0)) > 1e-9:
        raise NoCrossing(f"line search stalled at e = {e0:g}")
    w_p = linf_norm(linearize(m, equilibrium(m, e0))).w_peak
    return CriticalGain(e0, w_p)


def synthesize_perturbation(m: FHNModel = NOMINAL, eps: float = 0.0) -> AllPassPerturbation:
    """``(1 + eps) delta_0`` where ``delta_0`` is the all-pass marginal
    stabilizer of ``g_{e0}`` at its peak frequency with ``delta_0(0) = e0``."""
    e0, w_p = critical_static_gain(m)
    g = linearize(m, equilibrium(m, e0))
    d0 = solve_marginal(g, w_p, e0)
    if d0 is None:
        raise NoCrossing("no all-pass marginal stabilizer at the critical gain")
    return d0.scaled(1 + eps)


def closed_loop_stable(m: FHNModel, delta: AllPassPerturbation | float | None) -> bool:
    """Strict stability of the linearization at the equilibrium shifted by
    ``delta(0)``."""
    if delta is None:
        return equilibrium(m, 0.0).stable
    if isinstance(delta, AllPassPerturbation):
        g = linearize(m, equilibrium(m, delta.dc_gain))
        return is_hurwitz(closed_loop_poly(g, delta.b, delta.a))
    g = linearize(m, equilibrium(m, float(delta)))
    return is_hurwitz(g.den - g.num * float(delta), TAU_STAB)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # columns v, w, x
    outcome: str
    amplitude: float
    period: float | None
    thresholds: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["t", "v", "w", "x"])
        for t, (v, w, x) in zip(self.times, self.states):
            wr.writerow([fmt9(t), fmt9(v), fmt9(w), fmt9(x)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "outcome": self.outcome,
            "amplitude": self.amplitude,
            "period": self.period,
            "terminal_state": [float(s) for s in self.states[-1]],
            "thresholds": self.thresholds,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def _rhs(m: FHNModel, delta):
    c, tau, al, be = m.c, m.tau, m.alpha, m.beta
    if delta is None:
        def f(v, w, x):
            return (m.psi(v) - w) / c, (v + al - be * w) / tau, 0.0
    elif isinstance(delta, AllPassPerturbation):
        a, b = delta.a, delta.b
        # delta(s) = -b + 2ab/(s + a): one state x with x' = -a x + w
        def f(v, w, x):
            u = -b * w + 2 * a * b * x
            return (m.psi(v) - w - u) / c, (v + al - be * w) / tau, -a * x + w
    else:
        k = float(delta)
        def f(v, w, x):
            return (m.psi(v) - (1 + k) * w) / c, (v + al - be * w) / tau, 0.0
    return f


def simulate(
    m: FHNModel = NOMINAL,
    delta: AllPassPerturbation | float | None = None,
    x0: Sequence[float] | None = None,
    t_end: float = 2000.0,
    dt: float = 0.01,
) -> Trajectory:
    """Fixed-step RK4 integration and outcome classification.

    ``delta`` is an all-pass perturbation, a constant gain, or ``None``.
    The default start is the nominal equilibrium nudged by 0.1 in ``v``
    (all-pass state at rest).
    """
    if dt <= 0 or t_end <= dt:
        raise ValueError("need dt > 0 and t_end > dt")
    if x0 is None:
        eq = equilibrium(m, 0.0)
        x0 = (eq.v_bar + 0.1, eq.w_bar, 0.0)
    f = _rhs(m, delta)
    n = int(round(t_end / dt))
    out = np.empty((n + 1, 3))
    v, w, x = map(float, x0)
    out[0] = v, w, x
    h2, h6 = dt / 2, dt / 6
    for k in range(1, n + 1):
        k1 = f(v, w, x)
        k2 = f(v + h2 * k1[0], w + h2 * k1[1], x + h2 * k1[2])
        k3 = f(v + h2 * k2[0], w + h2 * k2[1], x + h2 * k2[2])
        k4 = f(v + dt * k3[0], w + dt * k3[1], x + dt * k3[2])
        v += h6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        w += h6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        x += h6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        if not abs(v) < 1e6:
            raise NonFinite(f"state diverged at t = {k * dt:g}")
        out[k] = v, w, x
    times = np.arange(n + 1) * dt
    return _classify(times, out)


def _upcrossing_times(t: np.ndarray, y: np.ndarray, level: float) -> np.ndarray:
    s = y - level
    idx = np.flatnonzero((s[:-1] < 0) & (s[1:] >= 0))
    frac = -s[idx] / (s[idx + 1] - s[idx])
    return t[idx] + frac * (t[idx + 1] - t[idx])


def _classify(times: np.ndarray, states: np.ndarray) -> Trajectory:
    thresholds = {
        "settle_band": SETTLE_BAND,
        "settle_fraction": SETTLE_FRACTION,
        "cycle_amplitude": CYCLE_AMPLITUDE,
        "cycle_window": CYCLE_WINDOW,
        "period_agreement": PERIOD_AGREEMENT,
    }
    n = len(times)
    tail = states[int(n * (1 - SETTLE_FRACTION)) :]
    win_v = states[int(n * (1 - CYCLE_WINDOW)) :, 0]
    amp = float(win_v.max() - win_v.min())
    # periods from the whole run at the window's mid-level; the first
    # crossing still carries the start-up transient
    ups = _upcrossing_times(times, states[:, 0], float(0.5 * (win_v.max() + win_v.min())))
    periods = np.diff(ups[1:])
    period = float(periods.mean()) if periods.size else None

    if np.all(np.abs(tail - tail.mean(axis=0)) <= SETTLE_BAND):
        outcome = "converged"
    elif (
        amp > CYCLE_AMPLITUDE
        and periods.size >= 2
        and np.ptp(periods) <= PERIOD_AGREEMENT * periods.mean()
    ):
        outcome = "limit_cycle"
    else:
        outcome = "undecided"
    if outcome != "limit_cycle":
        period = None
    return Trajectory(times, states, outcome, amp, period, thresholds)

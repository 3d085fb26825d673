"""Rational transfer functions: evaluation, poles/zeros, L-infinity norm,
parity interlacing and Nyquist data."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    CancellationError,
    DegenerateLoop,
    NotProper,
    PoleAtOrigin,
    PoleOnAxis,
    ZeroDenominator,
)
from .poly import Polynomial, roots

CANCEL_TOL = 1e-9
NEAR_CANCEL_TOL = 1e-7
AXIS_TOL = 1e-7
EVAL_POLE_TOL = 1e-12


def is_real_root(r: complex) -> bool:
    return abs(r.imag) < 1e-7 * (1 + abs(r.real))


def _safe_roots(p: Polynomial) -> np.ndarray:
    if p.is_zero() or p.degree == 0:
        return np.zeros(0, dtype=complex)
    return roots(p)


@dataclass(frozen=True, eq=False)
class RationalTF:
    """``num(s) / den(s)`` with real polynomial coefficients.

    ``near_cancellation`` flags a numerator/denominator root pair closer than
    1e-7 that was still accepted by :func:`from_coeffs`.
    """

    num: Polynomial
    den: Polynomial
    near_cancellation: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDenominator("denominator is identically zero")

    def __call__(self, s):
        return self.num(s) / self.den(s)

    def __eq__(self, other):
        if not isinstance(other, RationalTF):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __repr__(self):
        return f"RationalTF(num={self.num.coeffs.tolist()}, den={self.den.coeffs.tolist()})"

    def __str__(self):
        return f"({self.num}) / ({self.den})"

    def __mul__(self, k: float) -> "RationalTF":
        return RationalTF(self.num * k, self.den, self.near_cancellation)

    __rmul__ = __mul__

    @property
    def order(self) -> int:
        return self.den.degree

    @property
    def relative_degree(self) -> int:
        if self.num.is_zero():
            return math.inf
        return self.den.degree - self.num.degree

    def is_proper(self) -> bool:
        return self.relative_degree >= 0

    def is_strictly_proper(self) -> bool:
        return self.relative_degree >= 1

    def poles(self) -> np.ndarray:
        return _safe_roots(self.den)

    def zeros(self) -> np.ndarray:
        return _safe_roots(self.num)

    def eval_jw(self, w: float) -> complex:
        return eval_jw(self, w)


def from_coeffs(num_coeffs: Sequence[float], den_coeffs: Sequence[float]) -> RationalTF:
    """Build ``num/den`` from ascending coefficient lists.

    Raises CancellationError when a numerator root sits within 1e-9 of a
    denominator root.
    """
    num = Polynomial(num_coeffs)
    den = Polynomial(den_coeffs)
    if den.is_zero():
        raise ZeroDenominator("denominator coefficients are all zero")
    if not (num.is_real and den.is_real):
        raise ValueError("transfer function coefficients must be real")
    zs, ps = _safe_roots(num), _safe_roots(den)
    near = False
    if zs.size and ps.size:
        gap = np.min(np.abs(zs[:, None] - ps[None, :]))
        if gap < CANCEL_TOL:
            raise CancellationError(f"numerator and denominator share a root (gap {gap:.3g})")
        near = bool(gap < NEAR_CANCEL_TOL)
    return RationalTF(num, den, near)


def complementary(h: RationalTF) -> RationalTF:
    """``h / (1 - h)`` written as ``n_h / (d_h - n_h)``."""
    den = h.den - h.num
    if den.is_zero():
        raise DegenerateLoop("d_h - n_h vanishes identically")
    if h.num.is_zero():
        return RationalTF(Polynomial([0.0]), Polynomial([1.0]))
    return from_coeffs(h.num.coeffs, den.coeffs)


def eval_jw(g: RationalTF, w: float) -> complex:
    s = 1j * w
    d = g.den(s)
    if abs(d) < EVAL_POLE_TOL:
        raise PoleOnAxis(f"pole at s = j{w:g}")
    return complex(g.num(s) / d)


def check_no_axis_poles(g: RationalTF) -> None:
    for p in g.poles():
        if abs(p.real) < AXIS_TOL:
            raise PoleOnAxis(f"pole {p:.6g} lies on the imaginary axis")


def _require_proper(g: RationalTF) -> None:
    if not g.is_proper():
        raise NotProper("transfer function is improper")


def magnitude_squared(p: Polynomial) -> Polynomial:
    """``|p(jw)|^2`` as a polynomial in ``W = w**2``."""
    m = (p * p.mirror()).coeffs
    even = m[0::2]
    return Polynomial(even * (-1.0) ** np.arange(len(even)))


class LinfNorm(NamedTuple):
    norm: float
    w_peak: float  # math.inf when a biproper g peaks at infinite frequency

    @property
    def at_infinity(self) -> bool:
        return math.isinf(self.w_peak)


def linf_norm(g: RationalTF) -> LinfNorm:
    """Exact ``sup_w |g(jw)|`` from the stationary points of ``|g(jw)|^2``.

    With ``W = w**2`` the squared magnitude is a ratio ``N(W)/D(W)``; the
    candidates are ``W = 0``, the nonnegative real roots of ``N'D - ND'``
    and the limit ``W -> inf``.  Ties go to the smallest frequency.
    """
    _require_proper(g)
    check_no_axis_poles(g)
    if g.num.is_zero():
        return LinfNorm(0.0, 0.0)
    N, D = magnitude_squared(g.num), magnitude_squared(g.den)
    stat = N.derivative() * D - N * D.derivative()
    cands = [0.0]
    if not stat.is_zero() and stat.degree >= 1:
        for r in roots(stat):
            # extra candidates are harmless: each is an honest evaluation
            if abs(r.imag) <= 1e-6 * (1 + abs(r.real)) and r.real > 0:
                cands.append(float(r.real))
    cands = sorted(set(cands))
    vals = [float(N(W) / D(W)) for W in cands]
    best = max(vals)
    k = next(i for i, v in enumerate(vals) if v >= best * (1 - 1e-12))
    peak2, w_peak = best, math.sqrt(cands[k])
    if g.relative_degree == 0:
        lim = float(N.lead / D.lead)
        if lim > peak2 * (1 + 1e-12):
            peak2, w_peak = lim, math.inf
    return LinfNorm(math.sqrt(peak2), w_peak)


def static_gain(g: RationalTF) -> float:
    d0 = g.den[0]
    if abs(d0) < EVAL_POLE_TOL:
        raise PoleAtOrigin("g has a pole at s = 0")
    return float(g.num[0] / d0)


def unstable_poles(g: RationalTF) -> list[complex]:
    return [complex(p) for p in g.poles() if p.real > 0]


def pip_holds(g: RationalTF) -> bool:
    """Parity interlacing: an even number of real unstable poles between
    every consecutive pair of real closed-RHP zeros, the zero at infinity
    included once whenever the relative degree is at least one."""
    zs = sorted(float(z.real) for z in g.zeros() if is_real_root(z) and z.real >= 0)
    if g.relative_degree >= 1:
        zs.append(math.inf)
    ps = [float(p.real) for p in g.poles() if is_real_root(p) and p.real > 0]
    for lo, hi in zip(zs, zs[1:]):
        if sum(lo < p < hi for p in ps) % 2:
            return False
    return True


@dataclass
class Projection:
    omega: float
    point: complex
    radius: float


@dataclass
class NyquistCurve:
    freqs: np.ndarray
    points: np.ndarray
    annotation: str = ""
    projection: Projection | None = None
    skipped: list[float] = field(default_factory=list)

    def __post_init__(self):
        if len(self.freqs) != len(self.points):
            raise ValueError("freqs and points differ in length")
        if np.any(np.diff(self.freqs) <= 0):
            raise ValueError("freqs must be strictly increasing")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["omega", "re", "im"])
        for om, z in zip(self.freqs, self.points):
            w.writerow([fmt9(om), fmt9(z.real), fmt9(z.imag)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        proj = None
        if self.projection is not None:
            p = self.projection
            proj = {"omega": p.omega, "re": p.point.real, "im": p.point.imag, "radius": p.radius}
        return {
            "annotation": self.annotation,
            "omega": [float(x) for x in self.freqs],
            "re": [float(z.real) for z in self.points],
            "im": [float(z.imag) for z in self.points],
            "projection": proj,
            "skipped": list(self.skipped),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def fmt9(x: float) -> str:
    """Locale-free 9-significant-digit number format used in all CSV output."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.9g}"


def nyquist(
    f: RationalTF,
    w_min: float,
    w_max: float,
    n_points: int,
    scale: str = "linear",
    annotation: str = "",
    g: RationalTF | None = None,
) -> NyquistCurve:
    """Sample ``f(jw)`` on ``[w_min, w_max]`` (both endpoints included).

    When ``g`` is given the projection annotation is attached: the peak
    frequency of ``g``, ``f`` at that frequency, and the radius ``1/||g||``.
    Samples that hit a pole are skipped and listed in ``skipped``.
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    if scale == "linear":
        ws = np.linspace(w_min, w_max, n_points)
    elif scale == "log":
        if w_min <= 0:
            raise ValueError("log scale needs w_min > 0")
        ws = np.logspace(math.log10(w_min), math.log10(w_max), n_points)
        ws[0], ws[-1] = w_min, w_max
    else:
        raise ValueError(f"unknown scale {scale!r}")
    keep, pts, skipped = [], [], []
    for w in ws:
        try:
            pts.append(eval_jw(f, float(w)))
            keep.append(float(w))
        except PoleOnAxis:
            skipped.append(float(w))
    proj = None
    if g is not None:
        nrm = linf_norm(g)
        w_p = nrm.w_peak
        at = f.num.lead / f.den.lead if math.isinf(w_p) else eval_jw(f, w_p)
        proj = Projection(w_p, complex(at), 1.0 / nrm.norm)
    return NyquistCurve(np.array(keep), np.array(pts, dtype=complex), annotation, proj, skipped)

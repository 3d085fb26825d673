"""Bounds on the robust instability radius and the assembled report."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .allpass import DEFAULT_EPSILONS, AllPassPerturbation, certify_exact_rir
from .poly import TAU_STAB, Polynomial, is_hurwitz, roots
from .errors import PoleAtOrigin
from .xfer import (
    RationalTF,
    check_no_axis_poles,
    is_real_root,
    linf_norm,
    pip_holds,
    static_gain,
    unstable_poles,
)

TAGS = ("prop2_exact", "allpass_exact", "unknown", "infinite_pip")


def lower_bound_peak(g: RationalTF) -> tuple[float, float]:
    """``(1/||g||_Linf, peak frequency)``."""
    nrm = linf_norm(g)
    return 1.0 / nrm.norm, nrm.w_peak


class StaticBound(NamedTuple):
    rho_o: float
    tight: bool


def _odd_part_on_axis(p: Polynomial) -> Polynomial:
    """Polynomial in ``w`` equal to ``Im p(jw)`` for real ``p``."""
    c = np.zeros(len(p))
    for k in range(1, len(p), 2):
        c[k] = p.coeffs[k] * (-1) ** ((k - 1) // 2)
    return Polynomial(c)


def _even_part_on_axis(p: Polynomial) -> Polynomial:
    c = np.zeros(len(p))
    for k in range(0, len(p), 2):
        c[k] = p.coeffs[k] * (-1) ** (k // 2)
    return Polynomial(c)


def real_on_axis_only_at_dc(g: RationalTF) -> bool:
    """True iff ``Im g(jw) = 0`` has no solution with ``w > 0``."""
    im = _odd_part_on_axis(g.num * g.den.mirror())
    if im.is_zero():
        return False
    if im.degree == 0:
        return True
    return not any(is_real_root(w) and w.real > 1e-9 for w in roots(im))


def lower_bound_static(g: RationalTF) -> StaticBound | None:
    """Static-gain bound ``1/|g(0)|``, or ``None`` when g has a pole at the
    origin or an even number of open-RHP poles.

    ``tight`` is set when g is stabilizable by a real gain and either
    ``g(jw)`` is real only at ``w = 0`` or the real radius already equals the
    bound (the radius is squeezed between the two).
    """
    if not g.is_strictly_proper():
        raise ValueError("the static bound needs a strictly proper g")
    try:
        g0 = static_gain(g)
    except PoleAtOrigin:
        return None
    if len(unstable_poles(g)) % 2 == 0 or g0 == 0:
        return None
    rho_o, rho_r = 1.0 / abs(g0), real_rir(g)
    tight = math.isfinite(rho_r) and (real_on_axis_only_at_dc(g) or abs(rho_r - rho_o) <= 1e-9 * rho_o)
    return StaticBound(rho_o, tight)


def _axis_crossing_gains(g: RationalTF) -> list[float]:
    """Real gains ``delta`` for which ``d - delta n`` has an imaginary-axis
    root, plus the biproper degree-drop gain."""
    n, d = g.num, g.den
    gains: list[float] = []
    im = _odd_part_on_axis(d * n.mirror())
    if im.is_zero():
        ws = np.concatenate([[0.0], np.logspace(-4, 4, 2001)])
    elif im.degree == 0:
        ws = np.zeros(0)
    else:
        ws = [w.real for w in roots(im) if is_real_root(w) and w.real >= -1e-12]
        ws = np.abs(np.array(ws, dtype=float))
    for w in ws:
        nv = n(1j * w)
        if abs(nv) > 1e-12 * (1 + np.max(np.abs(n.coeffs))):
            gains.append(float((d(1j * w) / nv).real))
    if g.relative_degree == 0:
        gains.append(float(d.lead / n.lead))
    return sorted(set(gains))


def real_stabilizing_intervals(g: RationalTF) -> list[tuple[float, float]]:
    """Open intervals of real ``delta`` that make ``d - delta n`` Hurwitz."""
    bps = _axis_crossing_gains(g)
    if not bps:
        probes, spans = [0.0], [(-math.inf, math.inf)]
    else:
        probes = [bps[0] - max(1.0, abs(bps[0]))]
        spans = [(-math.inf, bps[0])]
        for lo, hi in zip(bps, bps[1:]):
            probes.append(0.5 * (lo + hi))
            spans.append((lo, hi))
        probes.append(bps[-1] + max(1.0, abs(bps[-1])))
        spans.append((bps[-1], math.inf))
    out = []
    for x, span in zip(probes, spans):
        cl = g.den - g.num * x
        if not cl.is_zero() and cl.degree >= 1 and is_hurwitz(cl):
            out.append(span)
    return out


def _closest_to_zero(lo: float, hi: float) -> float:
    if lo <= 0 <= hi:
        return 0.0
    return min(abs(lo), abs(hi))


def real_rir(g: RationalTF) -> float:
    """Infimum of ``|delta|`` over stabilizing real gains (``inf`` if none)."""
    check_no_axis_poles(g)
    spans = real_stabilizing_intervals(g)
    if not spans:
        return math.inf
    return min(_closest_to_zero(lo, hi) for lo, hi in spans)


class ComplexRIR(NamedTuple):
    value: float
    cell_diagonal: float
    resolution: int
    half_width: float


def _quadratic_mask(dco: np.ndarray, nco: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Complex Routh test of ``d - (x + jy) n`` for degree-2 ``d``, in real
    arithmetic, after the shift ``s -> s - TAU_STAB``."""
    if nco[2] == 0:
        # constant real leading coefficient keeps x and y separable
        ok = True
        p1, q1 = (dco[1] - x * nco[1]) / dco[2], -y * (nco[1] / dco[2])
        p0, q0 = (dco[0] - x * nco[0]) / dco[2], -y * (nco[0] / dco[2])
    else:
        lr, li = dco[2] - x * nco[2], -y * nco[2]
        den = lr * lr + li * li
        ok = den > (1e-12 * (1 + abs(dco[2]))) ** 2
        den = np.where(ok, den, 1.0)

        def over_lead(k):
            ar, ai = dco[k] - x * nco[k], -y * nco[k]
            return (ar * lr + ai * li) / den, (ai * lr - ar * li) / den

        p1, q1 = over_lead(1)
        p0, q0 = over_lead(0)
    t = TAU_STAB
    p0, q0 = p0 - p1 * t + t * t, q0 - q1 * t
    p1 = p1 - 2 * t
    return ok & (p1 > 0) & (p1 * p1 * p0 + p1 * q1 * q0 - q0 * q0 > 0)


def _stable_mask(g: RationalTF, deltas: np.ndarray) -> np.ndarray:
    """Vectorized test that ``d - delta n`` is strictly Hurwitz, per entry."""
    m = g.den.degree
    dco = np.asarray(g.den.coeffs, dtype=float)
    nco = np.zeros(m + 1)
    nco[: len(g.num)] = g.num.coeffs
    deltas = np.asarray(deltas)
    if m == 2:
        return _quadratic_mask(dco, nco, deltas.real, deltas.imag)
    dl = deltas.astype(complex).reshape(-1)
    cols = [dco[k] - dl * nco[k] for k in range(m + 1)]
    lead = cols[m]
    ok = np.abs(lead) > 1e-12 * (1 + np.abs(dco[m]))
    lead = np.where(ok, lead, 1.0)
    if m == 1:
        maxre = (-cols[0] / lead).real
    else:
        comp = np.zeros((dl.size, m, m), dtype=complex)
        comp[:, np.arange(1, m), np.arange(m - 1)] = 1.0
        for k in range(m):
            comp[:, k, m - 1] = -cols[k] / lead
        maxre = np.empty(dl.size)
        for i in range(0, dl.size, 50000):
            maxre[i : i + 50000] = np.linalg.eigvals(comp[i : i + 50000]).real.max(axis=1)
    return (ok & (maxre < -TAU_STAB)).reshape(deltas.shape)


def _ray_boundary(g: RationalTF, starts: np.ndarray, iters: int = 60) -> np.ndarray:
    """Shrink each stabilizing start toward the (unstable) origin and return
    the modulus of the last stabilizing point before the boundary."""
    lo, hi = np.zeros(starts.size), np.ones(starts.size)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = _stable_mask(g, mid * starts)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return hi * np.abs(starts)


def complex_rir(g: RationalTF, resolution: int = 600, half_width: float | None = None) -> ComplexRIR:
    """Grid (D-partition) estimate of the complex static-gain radius.

    Classifies a ``resolution x resolution`` grid of complex ``delta`` by the
    open-RHP root count of ``d - delta n``; the stabilizing grid points
    nearest the origin are pushed to the stability boundary by bisection and
    polished on a local fine grid.  The result is capped by the exact real
    radius.  Every candidate is the modulus of a stabilizing ``delta`` (or an
    infimum of such), so this is an upper estimate; ``inf`` if neither the
    box nor the real axis holds a stabilizing point.
    """
    check_no_axis_poles(g)
    if half_width is None:
        rho_p, _ = lower_bound_peak(g)
        half_width = 10.0 * max(1.0, rho_p)
    axis = np.linspace(-half_width, half_width, resolution)
    step = axis[1] - axis[0]
    diag = math.sqrt(2.0) * step
    ys = axis[axis >= 0]  # real g: stability region is symmetric about the real axis
    grid = axis[None, :] + 1j * ys[:, None]
    if g.den.degree == 2:
        # separable form: most of the arithmetic stays one-dimensional
        nco = np.zeros(3)
        nco[: len(g.num)] = g.num.coeffs
        stable = _quadratic_mask(np.asarray(g.den.coeffs, dtype=float), nco, axis[None, :], ys[:, None])
        stable = np.broadcast_to(stable, grid.shape)
    else:
        stable = _stable_mask(g, grid)
    # real gains are complex gains too; their infimum is exact
    real_inf = real_rir(g)
    if not stable.any():
        return ComplexRIR(real_inf, diag, resolution, half_width)

    def best_on(points: np.ndarray, k: int = 8) -> tuple[float, complex]:
        starts = points[np.argsort(np.abs(points))[:k]]
        vals = _ray_boundary(g, starts)
        i = int(np.argmin(vals))
        return float(vals[i]), starts[i] * vals[i] / abs(starts[i])

    val, where = best_on(grid[stable])
    local = np.linspace(-2 * step, 2 * step, 41)
    fine = where + local[None, :] + 1j * local[:, None]
    fine_stable = _stable_mask(g, fine)
    if fine_stable.any():
        v2, _ = best_on(fine[fine_stable])
        val = min(val, v2)
    return ComplexRIR(float(min(val, real_inf)), float(diag), resolution, float(half_width))


def _num(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _unnum(x):
    if x in ("inf", "-inf"):
        return float(x)
    return x


@dataclass
class RIRReport:
    rho_p: float
    omega_p: float
    rho_o: float | None
    rho_o_tight: bool
    rho_r: float
    rho_c: float
    rho_c_cell: float
    rho_c_resolution: int
    rho_star: float | None
    rho_star_tag: str
    pip: bool
    allpass: dict | None = field(default=None)

    def to_dict(self) -> dict:
        return {k: _num(v) for k, v in asdict(self).items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RIRReport":
        return cls(**{k: _unnum(v) for k, v in d.items()})

    @classmethod
    def from_json(cls, s: str) -> "RIRReport":
        return cls.from_dict(json.loads(s))

    @property
    def delta(self) -> AllPassPerturbation | None:
        return None if self.allpass is None else AllPassPerturbation.from_dict(self.allpass)


def report(
    g: RationalTF,
    resolution: int = 600,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
) -> RIRReport:
    """All bounds for an unstable ``g``, with ``rho_star`` certified when
    possible (PIP violation, tight static bound, or all-pass certificate)."""
    check_no_axis_poles(g)
    if not unstable_poles(g):
        raise ValueError("g is stable; the instability radius is zero")
    rho_p, omega_p = lower_bound_peak(g)
    static = lower_bound_static(g) if g.is_strictly_proper() else None
    rho_r = real_rir(g)
    crir = complex_rir(g, resolution)
    pip = pip_holds(g)
    allpass = None
    if not pip:
        rho_star, tag = math.inf, "infinite_pip"
    elif static is not None and static.tight:
        rho_star, tag = static.rho_o, "prop2_exact"
    else:
        cert = certify_exact_rir(g, epsilons)
        if cert is not None:
            rho_star, tag, allpass = cert.rho_star, "allpass_exact", cert.delta.to_dict()
        else:
            rho_star, tag = None, "unknown"
    return RIRReport(
        rho_p=rho_p,
        omega_p=omega_p,
        rho_o=None if static is None else static.rho_o,
        rho_o_tight=bool(static and static.tight),
        rho_r=rho_r,
        rho_c=crir.value,
        rho_c_cell=crir.cell_diagonal,
        rho_c_resolution=crir.resolution,
        rho_star=rho_star,
        rho_star_tag=tag,
        pip=pip,
        allpass=allpass,
    )

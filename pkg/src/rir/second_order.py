"""Exact radius for second-order systems ``k (r s - 1)/(s^2 + p s + q)`` and
the one-parameter family ``h(s) = 2 (s - z)/(s^2 + s - 2)``."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .bounds import report
from .errors import NotApplicable, NotInClass, RIRError
from .poly import Polynomial
from .xfer import RationalTF, check_no_axis_poles, fmt9, linf_norm


@dataclass(frozen=True)
class SecondOrderCanonical:
    r: float
    p: float
    q: float
    k: float = 1.0

    def tf(self) -> RationalTF:
        return RationalTF(Polynomial([-self.k, self.k * self.r]), Polynomial([self.q, self.p, 1.0]))


def canonicalize(g: RationalTF) -> SecondOrderCanonical:
    """Write ``g`` as ``k (r s - 1)/(s^2 + p s + q)``."""
    if g.den.degree != 2 or g.num.is_zero() or g.num.degree > 1:
        raise NotInClass("need a degree-2 denominator and a numerator of degree <= 1")
    n0, n1 = g.num[0], g.num[1]
    d0, d1, d2 = g.den.coeffs
    if n0 == 0:
        raise NotInClass("numerator constant term is zero")
    return SecondOrderCanonical(r=-n1 / n0, p=d1 / d2, q=d0 / d2, k=-n0 / d2)


def static_condition(c: SecondOrderCanonical) -> bool:
    return c.q < 0 and c.p + c.r * c.q > 0


def peak_condition(c: SecondOrderCanonical) -> bool:
    return c.q > 0 and c.p < 0 and c.r**2 * c.q**2 + 2 * c.q - c.p**2 > 0


def peak_frequency_sq(c: SecondOrderCanonical) -> float:
    """Squared peak frequency of ``|g(jw)|`` for the peak-gain branch."""
    r, p, q = c.r, c.p, c.q
    if r == 0:
        return q - p * p / 2
    return (math.sqrt((r * r * q * q + 2 * q - p * p) * r * r + 1) - 1) / (r * r)


class ExactRIR(NamedTuple):
    rho_star: float
    case: str  # "i" (static bound) or "ii" (peak bound)
    omega_p: float


def exact_rir_thm1(c: SecondOrderCanonical) -> ExactRIR | None:
    """Closed-form radius, already divided by ``|k|``; ``None`` outside both
    sufficient conditions."""
    if static_condition(c):
        return ExactRIR(abs(c.q) / abs(c.k), "i", 0.0)
    if peak_condition(c):
        W = peak_frequency_sq(c)
        w = math.sqrt(W)
        s = 1j * w
        gain = abs((c.r * s - 1) / (s * s + c.p * s + c.q))
        return ExactRIR(1.0 / gain / abs(c.k), "ii", w)
    return None


class ClosedForms(NamedTuple):
    a: float
    b: float
    x: float


def appendix_closed_forms(c: SecondOrderCanonical) -> ClosedForms:
    """All-pass pole ``a``, gain ``b`` and residual root ``x`` for ``r = 0``.

    Applies to the normalized system (``k = 1``).
    """
    if c.r != 0 or not peak_condition(c):
        raise NotApplicable("closed forms need r = 0, q > 0, p < 0, 2q > p^2")
    qh = math.sqrt(4 * c.q - c.p**2)
    return ClosedForms(a=(-c.p + qh) / 2, b=c.p * qh / 2, x=(qh + c.p) / 2)


def routh_margin(c: SecondOrderCanonical, eps: float) -> float:
    """``d1 d2 - d0`` of the cubic closed loop under ``(1 + eps) delta``."""
    a, b, _ = appendix_closed_forms(c)
    d2 = a + c.p
    d1 = a * c.p - (1 + eps) * b + c.q
    d0 = a * (c.q + (1 + eps) * b)
    return d1 * d2 - d0


# ---------------------------------------------------------------------------
# the z-family


class Family(NamedTuple):
    h: RationalTF
    g: RationalTF
    flags: tuple[str, ...]


def example_family(z: float) -> Family:
    """``h = 2 (s - z)/(s^2 + s - 2)`` and ``g = h/(1 - h)``.

    Built without the cancellation guard so the degenerate members
    (``z = 1``, ``z = -2``) can be inspected; ``flags`` names what is wrong.
    """
    h = RationalTF(Polynomial([-2.0 * z, 2.0]), Polynomial([-2.0, 1.0, 1.0]))
    g = RationalTF(h.num, Polynomial([2.0 * (z - 1), -1.0, 1.0]))
    flags = []
    # g's denominator at s = z equals h's: (z - 1)(z + 2)
    if abs(h.den(z)) < 1e-12:
        flags.append("cancellation")
    try:
        check_no_axis_poles(g)
    except RIRError:
        flags.append("pole_on_axis")
    return Family(h, g, tuple(flags))


def mu(z: float) -> float:
    return 4 * z**3 - z**2 - 8 * z + 4


def eta(z: float) -> float:
    return (z - 1) * (z + 2) * (z * z + 3 * z - 2)


def breakpoints() -> tuple[float, float, float]:
    """Real roots ``b1 < b2 < b3`` of ``mu``."""
    r = np.sort(Polynomial([4.0, -8.0, -1.0, 4.0]).roots().real)
    return float(r[0]), float(r[1]), float(r[2])


class Facts(NamedTuple):
    sigma0: float
    sigma1: float | None
    omega1: float | None
    eta: float
    mu: float


def facts_quantities(z: float) -> Facts:
    if z == 0:
        raise ZeroDivisionError("sigma0 = |(z - 1)/z| is undefined at z = 0")
    sigma0 = abs((z - 1) / z)
    e = eta(z)
    omega1 = sigma1 = None
    if e >= 0 and math.sqrt(e) >= z * z:
        omega1 = math.sqrt(math.sqrt(e) - z * z)
        g = example_family(z).g
        sigma1 = 1.0 / abs(g(1j * omega1))
    return Facts(sigma0, sigma1, omega1, e, mu(z))


def case_label(z: float) -> str:
    b1, _, b3 = breakpoints()
    if 0 <= z < 1:
        return "pip_violated"
    if z <= b1:
        return "a"
    if z < 0:
        return "b"
    if z <= b3:
        return "c"
    if z <= 2:
        return "d"
    return "e"


@dataclass
class ExampleRow:
    z: float
    case_label: str
    rho_star: float | None  # None: finite but unknown
    rho_star_tag: str
    rho_r: float
    rho_o: float | None
    rho_p: float
    omega_p: float
    thm1: float | None = None
    error: str | None = None


def table2(zs: Sequence[float], resolution: int = 600) -> list[ExampleRow]:
    rows = []
    for z in zs:
        label = case_label(z)
        fam = example_family(z)
        try:
            if fam.flags:
                raise RIRError(",".join(fam.flags))
            rep = report(fam.g, resolution=resolution)
            try:
                exact = exact_rir_thm1(canonicalize(fam.g))
            except NotInClass:
                exact = None
            rows.append(
                ExampleRow(
                    z, label, rep.rho_star, rep.rho_star_tag, rep.rho_r, rep.rho_o,
                    rep.rho_p, rep.omega_p, None if exact is None else exact.rho_star,
                )
            )
        except RIRError as exc:
            nan = math.nan
            rows.append(ExampleRow(z, label, None, "error", nan, None, nan, nan, None, str(exc)))
    return rows


def _cell(x, digits=3) -> str:
    if x is None:
        return "-"
    if math.isinf(x):
        return "-"
    if math.isnan(x):
        return "nan"
    return f"{x:.{digits}f}"


def _star_cell(row: ExampleRow) -> str:
    if row.rho_star_tag == "infinite_pip":
        return "inf"
    if row.rho_star is None:
        return "??"
    if row.rho_star_tag == "allpass_exact":
        return f"? ({row.rho_star:.3f})"
    return f"{row.rho_star:.3f}"


def format_table(rows: Sequence[ExampleRow]) -> str:
    head = f"{'case':<13}{'z':>7}  {'rho*':>11}{'rho_r':>8}{'rho_o':>8}{'rho_p':>8}{'w_p':>7}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(
            f"{r.case_label:<13}{r.z:>7g}  {_star_cell(r):>11}{_cell(r.rho_r):>8}"
            f"{_cell(r.rho_o):>8}{_cell(r.rho_p):>8}{_cell(r.omega_p, 2):>7}"
            + (f"  [{r.error}]" if r.error else "")
        )
    return "\n".join(lines) + "\n"


def table_csv(rows: Sequence[ExampleRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["z", "case", "rho_star", "rho_star_tag", "rho_r", "rho_o", "rho_p", "omega_p", "error"])
    for r in rows:
        w.writerow([
            fmt9(r.z), r.case_label,
            "" if r.rho_star is None else fmt9(r.rho_star), r.rho_star_tag,
            fmt9(r.rho_r), "" if r.rho_o is None else fmt9(r.rho_o),
            fmt9(r.rho_p), fmt9(r.omega_p), r.error or "",
        ])
    return buf.getvalue()


def peak_is_at_dc(z: float) -> bool:
    return linf_norm(example_family(z).g).w_peak == 0.0


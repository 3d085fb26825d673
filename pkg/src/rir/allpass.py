"""First-order all-pass perturbations that marginally stabilize ``g``.

A perturbation ``delta(s) = b (a - s)/(a + s)`` leaves exactly one pole pair
at ``+-j w_c`` (everything else strictly stable) iff

    b (a - s) n(s) - (a + s) d(s) = (s^2 + w_c^2) p(s)

for a Hurwitz ``p`` of degree ``n - 1``.  Matching coefficients gives
``n + 2`` linear equations in the ``n + 1`` unknowns ``(psi_0..psi_{n-1}, a)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegreeMismatch, NotProper
from .poly import Polynomial, is_hurwitz
from .xfer import RationalTF, check_no_axis_poles, linf_norm, unstable_poles

DEFAULT_EPSILONS = (1e-3, 1e-4)
REMAINDER_TOL = 1e-7


@dataclass(frozen=True)
class AllPassPerturbation:
    b: float
    a: float
    residual_poly: Polynomial
    omega_c: float
    residual_norm: float = 0.0

    def __call__(self, s):
        return self.b * (self.a - s) / (self.a + s)

    @property
    def hinf_norm(self) -> float:
        return abs(self.b)

    @property
    def dc_gain(self) -> float:
        return self.b

    def tf(self) -> RationalTF:
        return RationalTF(Polynomial([self.b * self.a, -self.b]), Polynomial([self.a, 1.0]))

    def scaled(self, factor: float) -> "AllPassPerturbation":
        """``factor * delta``; ``residual_poly`` still describes the unscaled solve."""
        return replace(self, b=self.b * factor)

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "omega_c": self.omega_c,
            "psi_coeffs": [float(c) for c in self.residual_poly.coeffs],
            "residual_norm": self.residual_norm,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AllPassPerturbation":
        return cls(d["b"], d["a"], Polynomial(d["psi_coeffs"]), d["omega_c"], d["residual_norm"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _coeff_vectors(g: RationalTF) -> tuple[np.ndarray, np.ndarray, int]:
    n = g.den.degree
    if n is None or n < 1:
        raise DegreeMismatch("g needs a denominator of degree >= 1")
    if not g.is_proper():
        raise NotProper("g must be proper")
    alpha = np.asarray(g.den.coeffs, dtype=float)
    beta = np.zeros(n + 1)
    beta[: len(g.num)] = g.num.coeffs
    return alpha, beta, n


def marginal_system(g: RationalTF, omega_c: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient-matching system ``A [psi; a] = rhs`` (``n + 2`` rows).

    Uses ``D = a P + S`` and ``N = a P - S`` with ``P`` the top-aligned and
    ``S`` the one-row-down embedding of ``R^(n+1)`` into ``R^(n+2)``.
    """
    alpha, beta, n = _coeff_vectors(g)
    omega = np.zeros((n + 2, n))
    omega[np.arange(n), np.arange(n)] = omega_c**2
    omega[np.arange(2, n + 2), np.arange(n)] = 1.0
    P = np.vstack([np.eye(n + 1), np.zeros((1, n + 1))])
    S = np.vstack([np.zeros((1, n + 1)), np.eye(n + 1)])
    A = np.hstack([omega, -(P @ (b * beta - alpha))[:, None]])
    rhs = -S @ (b * beta + alpha)
    return A, rhs


def solve_marginal(g: RationalTF, omega_c: float, b: float) -> AllPassPerturbation | None:
    """Least-squares solve of the marginal-stabilization system.

    Accepted only if the residual is at most ``1e-8 (1 + |alpha| + |beta|)``,
    ``a > 0`` and the residual polynomial is Hurwitz; otherwise ``None``.
    A zero ``omega_c`` (double root at the origin) is not a pole pair and
    always yields ``None``.
    """
    alpha, beta, n = _coeff_vectors(g)
    if omega_c <= 0 or b == 0 or not math.isfinite(omega_c):
        return None
    A, rhs = marginal_system(g, omega_c, b)
    x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    resid = float(np.linalg.norm(A @ x - rhs))
    psi, a = x[:n], float(x[n])
    tol = 1e-8 * (1 + np.linalg.norm(alpha) + np.linalg.norm(beta))
    if resid > tol or a <= 0:
        return None
    p = Polynomial(psi)
    if p.is_zero() or not is_hurwitz(p):
        return None
    return AllPassPerturbation(float(b), a, p, float(omega_c), resid)


def closed_loop_poly(g: RationalTF, b: float, a: float) -> Polynomial:
    """``b (a - s) n(s) - (a + s) d(s)``, the characteristic polynomial of
    ``1 - delta g`` without cancelling anything."""
    return Polynomial([b * a, -b]) * g.num - Polynomial([a, 1.0]) * g.den


def stabilizes(g: RationalTF, delta: AllPassPerturbation) -> bool:
    return is_hurwitz(closed_loop_poly(g, delta.b, delta.a))


def verify_marginal(g: RationalTF, d: AllPassPerturbation) -> bool:
    if d.b == 0:
        return False
    cl = closed_loop_poly(g, d.b, d.a)
    quot, rem = divmod(cl, Polynomial([d.omega_c**2, 0.0, 1.0]))
    if np.max(np.abs(rem.coeffs)) > REMAINDER_TOL:
        return False
    return not quot.is_zero() and is_hurwitz(quot)


class Certificate(NamedTuple):
    rho_star: float
    delta: AllPassPerturbation
    eps_used: float


def certify_exact_rir(
    g: RationalTF, epsilons: Sequence[float] = DEFAULT_EPSILONS
) -> Certificate | None:
    """Try to prove ``rho* = 1/||g||_Linf`` with an all-pass perturbation.

    Step 1 solves for a marginal stabilizer of norm ``1/||g||`` at the peak
    frequency (both signs of ``b``).  Step 2 walks the ``eps`` schedule in
    order and stops at the first ``eps`` for which ``(1 + eps) delta``
    strictly stabilizes and ``(1 - eps) delta`` does not; that ``eps`` is
    reported as ``eps_used``.  Returns ``None`` when the peak is at DC or
    infinity or no sign and ``eps`` pass.
    """
    check_no_axis_poles(g)
    if not unstable_poles(g):
        raise ValueError("g is already stable")
    nrm = linf_norm(g)
    rho_p, w_p = 1.0 / nrm.norm, nrm.w_peak
    if w_p == 0 or math.isinf(w_p):
        return None
    for b in (rho_p, -rho_p):
        delta = solve_marginal(g, w_p, b)
        if delta is None or not verify_marginal(g, delta):
            continue
        for eps in epsilons:
            if stabilizes(g, delta.scaled(1 + eps)) and not stabilizes(g, delta.scaled(1 - eps)):
                return Certificate(rho_p, delta, float(eps))
    return None

"""Random test systems and brute-force oracles shared by the test modules."""

from __future__ import annotations

import numpy as np

from rir.poly import Polynomial
from rir.xfer import RationalTF


def _random_roots(rng: np.random.Generator, count: int, lo: float, hi: float) -> list[complex]:
    out: list[complex] = []
    while len(out) < count:
        re = rng.uniform(lo, hi) * rng.choice([-1.0, 1.0])
        if count - len(out) >= 2 and rng.random() < 0.5:
            im = rng.uniform(0.3, 3.0)
            out += [complex(re, im), complex(re, -im)]
        else:
            out.append(complex(re, 0.0))
    return out


def random_system(
    rng: np.random.Generator,
    max_order: int = 4,
    unstable: bool = True,
    allow_biproper: bool = True,
) -> RationalTF:
    """Proper real system with poles at least 0.2 from the imaginary axis and
    damping bounded away from zero; zeros kept away from the poles."""
    m = int(rng.integers(1, max_order + 1))
    poles = _random_roots(rng, m, 0.2, 3.0)
    if unstable and not any(p.real > 0 for p in poles):
        poles = [complex(-p.real, p.imag) if abs(p.real) == abs(poles[0].real) else p for p in poles]
    n_zeros = int(rng.integers(0, m + 1 if allow_biproper else m))
    while True:
        zeros = _random_roots(rng, n_zeros, 0.0, 3.0)
        if all(abs(z - p) > 0.1 for z in zeros for p in poles):
            break
    k = rng.uniform(0.5, 3.0) * rng.choice([-1.0, 1.0])
    num = Polynomial.from_roots(zeros, lead=k) if zeros else Polynomial([k])
    return RationalTF(Polynomial(num.coeffs.real), Polynomial(Polynomial.from_roots(poles).coeffs.real))


def grid_peak(g: RationalTF, w: np.ndarray) -> float:
    s = 1j * w
    return float(np.max(np.abs(np.polyval(g.num.coeffs[::-1], s) / np.polyval(g.den.coeffs[::-1], s))))


def batched_max_real_root(g: RationalTF, deltas: np.ndarray) -> np.ndarray:
    """Rightmost root of ``d - delta n`` by companion eigenvalues, one matrix
    per real ``delta``; ``inf`` where the degree drops."""
    m = g.den.degree
    nco = np.zeros(m + 1)
    nco[: len(g.num)] = g.num.coeffs
    C = g.den.coeffs[None, :] - deltas[:, None] * nco[None, :]
    lead = C[:, m]
    ok = np.abs(lead) > 1e-12
    lead = np.where(ok, lead, 1.0)
    comp = np.zeros((deltas.size, m, m))
    comp[:, np.arange(1, m), np.arange(m - 1)] = 1.0
    comp[:, :, m - 1] = -C[:, :m] / lead[:, None]
    out = np.linalg.eigvals(comp).real.max(axis=1)
    return np.where(ok, out, np.inf)

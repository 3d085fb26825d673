"""Real polynomial arithmetic, root finding and strict Hurwitz testing.

Coefficients are stored in ascending order: ``coeffs[k]`` multiplies ``s**k``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ConstantPolynomial, ZeroPolynomial

# Shared strictness margin: a root counts as stable only if Re(root) < -TAU_STAB.
TAU_STAB = 1e-9


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return c[:1] * 0
    return c[: nz[-1] + 1]


class Polynomial:
    """Immutable polynomial with ascending coefficients.

    The zero polynomial is stored as ``[0]`` and has ``degree`` ``None``.
    Complex coefficients are accepted (they arise for complex static gains);
    real input stays real.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex] | float):
        c = np.atleast_1d(np.asarray(coeffs))
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if c.size == 0:
            c = np.zeros(1)
        if np.iscomplexobj(c):
            if np.all(c.imag == 0):
                c = c.real.astype(float)
            else:
                c = c.astype(complex)
        else:
            c = c.astype(float)
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c = _trim(c).copy()
        c.flags.writeable = False
        self._c = c

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: float = 1.0) -> "Polynomial":
        c = np.array([lead], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        # conjugate-closed root sets give real coefficients up to roundoff
        if np.max(np.abs(c.imag), initial=0.0) <= 1e-12 * (1 + np.max(np.abs(c))):
            c = c.real
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int | None:
        if self.is_zero():
            return None
        return len(self._c) - 1

    @property
    def lead(self) -> complex:
        return self._c[-1]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self._c)

    def is_zero(self) -> bool:
        return len(self._c) == 1 and self._c[0] == 0

    def __len__(self) -> int:
        return len(self._c)

    def __getitem__(self, k: int) -> complex:
        return self._c[k] if 0 <= k < len(self._c) else 0.0

    def __call__(self, s):
        return evaluate(self, s)

    def __repr__(self) -> str:
        return f"Polynomial({self._c.tolist()!r})"

    def __str__(self) -> str:
        return to_string(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self) -> int:
        return hash(tuple(self._c.tolist()))

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self._c)

    def __add__(self, other) -> "Polynomial":
        return add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        return sub(self, _coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return sub(_coerce(other), self)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __divmod__(self, other: "Polynomial"):
        return divmod_poly(self, other)

    def derivative(self) -> "Polynomial":
        return derivative(self)

    def mirror(self) -> "Polynomial":
        """Return p(-s)."""
        signs = (-1.0) ** np.arange(len(self._c))
        return Polynomial(self._c * signs)

    def shift(self, c: float) -> "Polynomial":
        """Return p(s + c) (Taylor shift via repeated synthetic division)."""
        a = self._c.astype(np.result_type(self._c, c)).copy()
        n = len(a)
        for i in range(n - 1):
            for k in range(n - 2, i - 1, -1):
                a[k] += c * a[k + 1]
        return Polynomial(a)

    def roots(self) -> np.ndarray:
        return roots(self)

    def is_hurwitz(self) -> bool:
        return is_hurwitz(self)


def _coerce(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial([x])


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    n = max(len(p), len(q))
    a = np.zeros(n, dtype=np.result_type(p.coeffs, q.coeffs))
    a[: len(p)] += p.coeffs
    a[: len(q)] += q.coeffs
    return Polynomial(a)


def sub(p: Polynomial, q: Polynomial) -> Polynomial:
    return add(p, -q)


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return Polynomial(np.convolve(p.coeffs, q.coeffs))


def scale(p: Polynomial, k: complex) -> Polynomial:
    return Polynomial(p.coeffs * k)


def derivative(p: Polynomial) -> Polynomial:
    if len(p) == 1:
        return Polynomial([0.0])
    return Polynomial(p.coeffs[1:] * np.arange(1, len(p)))


def divmod_poly(p: Polynomial, q: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Long division ``p = quot * q + rem`` with ``deg rem < deg q``."""
    if q.is_zero():
        raise ZeroPolynomial("division by the zero polynomial")
    num = p.coeffs.astype(np.result_type(p.coeffs, q.coeffs)).copy()
    den = q.coeffs
    dq = len(den) - 1
    if len(num) - 1 < dq:
        return Polynomial([0.0]), p
    quot = np.zeros(len(num) - dq, dtype=num.dtype)
    for k in range(len(num) - 1, dq - 1, -1):
        coef = num[k] / den[-1]
        quot[k - dq] = coef
        num[k - dq : k + 1] -= coef * den
    rem = num[:dq] if dq > 0 else num[:1] * 0
    return Polynomial(quot), Polynomial(rem)


def evaluate(p: Polynomial, s):
    """Horner evaluation; ``s`` may be a scalar or an array."""
    c = p.coeffs
    acc = np.zeros_like(np.asarray(s, dtype=np.result_type(s, c, float))) + c[-1]
    for a in c[-2::-1]:
        acc = acc * s + a
    if np.ndim(acc) == 0:
        return acc.item()
    return acc


def roots(p: Polynomial) -> np.ndarray:
    """All ``degree(p)`` roots, with multiplicity.

    Eigenvalues of the companion matrix of the monic-normalized polynomial
    (LAPACK balances before the shifted QR sweep), followed by a guarded
    Newton polish against the original coefficients.
    """
    if p.is_zero():
        raise ZeroPolynomial("roots of the zero polynomial")
    n = p.degree
    if n == 0:
        raise ConstantPolynomial("a constant polynomial has no roots")
    c = p.coeffs / p.lead
    if n == 1:
        return np.array([-c[0]], dtype=complex)
    comp = np.zeros((n, n), dtype=c.dtype)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:-1]
    r = np.linalg.eigvals(comp).astype(complex)
    return _polish(p, r)


def _polish(p: Polynomial, r: np.ndarray, iters: int = 3) -> np.ndarray:
    dp = derivative(p)
    out = r.copy()
    for i, x in enumerate(r):
        best, fbest = x, abs(evaluate(p, x))
        for _ in range(iters):
            d = evaluate(dp, x)
            if d == 0:
                break
            with np.errstate(over="ignore", invalid="ignore"):
                x = x - evaluate(p, x) / d
                fx = abs(evaluate(p, x))
            # a polish is a local correction; a long jump lands on another root
            local = abs(x - r[i]) <= 1e-6 * (1 + abs(r[i]))
            if local and np.isfinite(fx) and fx < fbest:
                best, fbest = x, fx
            else:
                break
        out[i] = best
    if p.is_real:
        # keep real roots real and complex roots in exact conjugate pairs
        tol = 1e-12 * (1 + np.abs(out))
        near_real = np.abs(out.imag) <= tol
        out[near_real] = out[near_real].real
    return out


def is_hurwitz(p: Polynomial, margin: float = TAU_STAB) -> bool:
    """True iff every root of ``p`` has real part below ``-margin``.

    Real polynomials go through the Routh table of ``p(s - margin)``, with a
    zero or negative first-column entry counting as failure.  Complex
    polynomials fall back to explicit roots.
    """
    if p.is_zero():
        raise ZeroPolynomial("Hurwitz test of the zero polynomial")
    if p.degree == 0:
        return True
    if not p.is_real:
        return bool(np.max(roots(p).real) < -margin)
    q = p.shift(-margin) if margin else p
    return routh_first_column_positive(q.coeffs)


def routh_first_column_positive(coeffs: Sequence[float]) -> bool:
    a = np.asarray(coeffs, dtype=float)[::-1]  # descending
    if a[0] < 0:
        a = -a
    if np.any(a <= 0):
        return False
    n = len(a) - 1
    prev = a[0::2].copy()
    cur = a[1::2].copy()
    for _ in range(n):
        if cur.size == 0 or cur[0] <= 0:
            return False
        nxt = np.zeros(max(prev.size - 1, 0))
        for k in range(nxt.size):
            right = cur[k + 1] if k + 1 < cur.size else 0.0
            nxt[k] = prev[k + 1] - prev[0] * right / cur[0]
        prev, cur = cur, nxt
    return True


def to_string(p: Polynomial, var: str = "s") -> str:
    """Conventional descending-degree rendering, e.g. ``s^2 + s - 2``."""
    if p.is_zero():
        return "0"
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        if np.iscomplexobj(c):
            coef = f"({c:.6g})"
            sign = "+"
        else:
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            coef = "" if (mag == 1 and k > 0) else f"{mag:.6g}"
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        body = coef + ("*" if coef and mono and coef.startswith("(") else "") + mono
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out

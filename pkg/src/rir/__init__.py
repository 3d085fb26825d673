"""Robust instability radius of unstable SISO feedback loops ``1 - delta(s) g(s)``."""

from .allpass import AllPassPerturbation, certify_exact_rir, solve_marginal, verify_marginal
from .bounds import (
    RIRReport,
    complex_rir,
    lower_bound_peak,
    lower_bound_static,
    real_rir,
    report,
)
from .poly import TAU_STAB, Polynomial, is_hurwitz, roots
from .xfer import RationalTF, complementary, from_coeffs, linf_norm, pip_holds

__version__ = "0.1.0"

"""Exception hierarchy.

Input errors describe a system or argument outside an operation's domain;
numerical errors mean a computation that should have succeeded did not.
The CLI maps the first family to exit status 2 and the second to 3.
"""


class RIRError(Exception):
    """Base class for all errors raised by this package."""


class InputError(RIRError, ValueError):
    pass


class NumericalError(RIRError, ArithmeticError):
    pass


class ZeroPolynomial(InputError):
    pass


class ConstantPolynomial(InputError):
    pass


class ZeroDenominator(InputError):
    pass


class CancellationError(InputError):
    """Numerator and denominator share a root (within 1e-9)."""


class NotProper(InputError):
    pass


class DegenerateLoop(InputError):
    """1 - h(s) vanishes identically."""


class PoleOnAxis(InputError):
    pass


class PoleAtOrigin(InputError):
    pass


class DegreeMismatch(InputError):
    pass


class NotInClass(InputError):
    pass


class NotApplicable(InputError):
    pass


class NonUnique(InputError):
    """FitzHugh-Nagumo equilibrium is not unique (1 + e <= beta)."""


class NoRealRoot(NumericalError):
    pass


class NoCrossing(NumericalError):
    pass


class NonFinite(NumericalError):
    pass

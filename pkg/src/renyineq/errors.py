"""Exception taxonomy shared across the package.

Numerical failures (integrals that blow up, masses that do not exist)
derive from :class:`NumericalError`.  Contract violations that a caller
could have checked upfront (bad parameters, evaluation outside a support)
derive from :class:`ValueError`.
"""


class NumericalError(Exception):
    """Base class for runtime numerical failures."""


class NonFiniteIntegrand(NumericalError):
    """The integrand returned NaN or infinity away from its declared singular points."""


class DivergentIntegral(NumericalError):
    """Integrand values or partial sums exceeded the overflow guard, or the
    refinement budget was exhausted without the error contracting."""


class NotNormalizable(NumericalError):
    """A candidate density has non-finite mass."""


class ZeroMass(NumericalError):
    """A candidate density has numerically vanishing mass."""


class OutsideSupport(ValueError):
    """A density was evaluated strictly outside the closure of its support."""


class NotDifferentiable(ValueError):
    """A derivative of higher order than the density provides was requested."""


class SupportMismatch(ValueError):
    """Densities that must share a support interval do not."""


class DegenerateParameters(ValueError):
    """Parameter values collapse a formula (zero denominator in an exponent
    or prefactor, coincident order parameters)."""


class PreconditionViolated(ValueError):
    """A structural hypothesis fails: monotonicity, curvature bound, or
    finiteness of an auxiliary integral required by a construction."""

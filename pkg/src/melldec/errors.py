"""Exception and warning types shared across the package."""


class MelldecError(Exception):
    """Base class for all computational errors raised by this package."""


class StripViolation(MelldecError):
    """A complex abscissa lies outside the analyticity strip of a transform.

    Carries the offending abscissa and the strip bounds for diagnostics.
    """

    def __init__(self, sigma, strip, msg=None):
        self.sigma = sigma
        self.strip = strip
        super().__init__(
            msg or f"Re(z)={sigma:g} outside analyticity strip ({strip.a:g}, {strip.b:g})"
        )


class NonConvergence(MelldecError):
    """A quadrature or iterative refinement failed to reach the requested tolerance."""


class PoleError(MelldecError):
    """Evaluation requested at a pole (nonpositive integer of the gamma function)."""


class IllConditioned(MelldecError):
    """A linear system is too ill-conditioned to solve reliably."""


class DivergentIntegrand(MelldecError):
    """A line integrand does not decay within the frequency budget.

    Signals a non-integrable kernel/error-density pairing.
    """


class NotIdentifiable(MelldecError):
    """The error density does not identify the target (symmetric case)."""


class EmptySample(MelldecError):
    """An estimator was called with an empty sample."""


class DomainError(MelldecError):
    """A closed formula was evaluated outside its domain of validity."""


class DegenerateDesign(MelldecError):
    """Too few distinct design points for a regression."""


class ParseError(MelldecError):
    """A sample file contains a non-numeric row; carries the line number."""

    def __init__(self, line, msg=None):
        self.line = line
        super().__init__(msg or f"non-numeric value at line {line}")


class EmptyFile(MelldecError):
    """A sample file contains no data rows."""


class BandwidthTooLarge(UserWarning):
    """The selected bandwidth is outside the range where the risk
    guarantees apply (advisory only)."""


class SupportWarning(UserWarning):
    """Sample values outside the reachable support of the model (advisory only)."""

"""Error hierarchy shared by the library and the command line."""

from __future__ import annotations


class GPFPError(Exception):
    """Base class for all toolkit errors.

    Every subclass carries a stable machine ``code`` and the process exit code
    the CLI uses when the error escapes a subcommand.
    """

    code = "gpfp-error"
    exit_code = 1

    def one_line(self) -> str:
        """Render the error as a single machine-parsable line."""
        message = " ".join(str(self).split())
        return f"error[{self.code}]: {message}"


class DomainError(GPFPError, ValueError):
    """An operation was called outside its precondition."""

    code = "domain"
    exit_code = 2


class NormalizationError(GPFPError):
    """The total mass of a raw spec is not finite and positive."""

    code = "normalization"
    exit_code = 3


class ExactPathUnavailable(GPFPError):
    """Exact rational computation was requested for a spec without an exact form."""

    code = "exact-unavailable"
    exit_code = 4


class OutsideRegimeError(GPFPError):
    """The requested power / exponent window is outside the proven regime."""

    code = "outside-regime"
    exit_code = 4


class ToleranceNotMetError(GPFPError):
    """Quadrature or refinement hit its cap before meeting the tolerance."""

    code = "tolerance"
    exit_code = 3


class IllConditionedError(GPFPError):
    """Evaluation point too close to a singular set."""

    code = "ill-conditioned"
    exit_code = 2


class ProbeTooCloseError(GPFPError):
    """The contour image passes within tolerance of a probe point."""

    code = "probe-too-close"
    exit_code = 5


class DecayNotCertifiedError(GPFPError):
    """The small circle or large arc radius search did not certify the decay bounds."""

    code = "decay"
    exit_code = 5

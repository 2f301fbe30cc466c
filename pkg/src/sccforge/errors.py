"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input is well-formed but outside the domain of the operation."""


class ResourceLimitError(RuntimeError):
    """Request would exceed a configured enumeration or search budget."""


class UnsupportedCodeError(DomainError):
    """Code has no entry in the hardware mapping being queried."""


class SingularSystemError(ValueError):
    """Linear system has no unique solution.

    Carries the solvability report (when one was computed) so callers can
    inspect ranks without re-running elimination.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FitError(DomainError):
    """Regression input is degenerate (too few or collinear points)."""

"""Shared exception and warning types."""


class ValidationError(ValueError):
    """A configuration or precondition check failed before any compute ran."""


class NumericsError(RuntimeError):
    """An integration produced evidence of misconfiguration (positivity loss,
    step underflow, inadequate Fock cutoff escalated by the caller)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class UnreachableTargetError(ValueError):
    """A design target lies outside the reachable parameter domain."""


class TruncationWarning(UserWarning):
    """A constructed operator or state carries non-negligible weight at the
    top of the truncated Fock ladder."""

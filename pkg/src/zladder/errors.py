"""Shared exception types."""


class AccuracyError(ValueError):
    """An evaluation was requested outside the validity window of the method."""


class ConvergenceError(RuntimeError):
    """An iterative solver or refinement loop hit its iteration/escalation cap."""

"""Exception hierarchy shared by every module."""


class ToolkitError(Exception):
    """Base class for all errors raised by shrinker4."""


class DomainError(ToolkitError):
    """A point lies outside (or on the boundary of) its chart box."""


class DegenerateMetricError(ToolkitError):
    """The metric is singular or not positive-definite at a point."""


class ShapeError(ToolkitError):
    """Tensor valences or array shapes do not match."""


class InconsistencyError(ToolkitError):
    """Inputs violate an algebraic identity they are required to satisfy."""


class UnsupportedError(ToolkitError):
    """The request is outside what the toolkit can evaluate (e.g. integrals on non-compact atlases)."""


class EvaluationError(ToolkitError):
    """A field produced a non-finite value during quadrature."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class NotShrinkingError(ToolkitError):
    """Soliton constant rho <= 0; steady and expanding compact solitons are Einstein."""


class NormalizationRequiredError(ToolkitError):
    """The operation expects a candidate normalized to rho = 1/2."""


class UnknownNameError(ToolkitError, KeyError):
    """Unknown zoo metric, catalog block, or structure name."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class InvalidParameterError(ToolkitError, ValueError):
    """Parameters outside the documented range."""

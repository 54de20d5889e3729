"""Exception types shared across the package."""


class OscboundError(Exception):
    """Base class for all package errors."""


class GeometryError(OscboundError):
    """Invalid domain input or a certificate that failed validation."""


class FieldError(OscboundError):
    """Invalid coefficient field request."""


class MeshError(OscboundError):
    """Mesh generation or mesh invariant failure."""


class SolverError(OscboundError):
    """Assembly or linear-solve failure; carries residual history if relevant."""

    def __init__(self, message, residual_history=None):
        super().__init__(message)
        self.residual_history = residual_history


class MeanValueError(OscboundError):
    """Mean-value family construction or averaging failure."""


class InequalityError(OscboundError):
    """Invalid inequality parameters or an inadmissible sample."""


class ConfigError(OscboundError):
    """Configuration parsing failure; carries line-numbered diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))

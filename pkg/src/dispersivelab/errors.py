"""Exception types shared across the library.

Every error that a caller can reasonably branch on gets its own class;
everything else surfaces as plain ValueError at the point of misuse.
"""


class DispersiveLabError(Exception):
    """Base class for library-specific failures."""


class GridError(DispersiveLabError):
    """Malformed grid specification (bad dimensions, non power-of-two n, ...)."""


class SymbolError(DispersiveLabError):
    """Dispersion symbol violates its declared structure (homogeneity,
    boundedness on the sphere, NaN on the lattice)."""


class OutOfRangeError(DispersiveLabError):
    """Dyadic index outside the representable range of a stack or grid."""


class UnsupportedScaleError(DispersiveLabError):
    """Rescaling factor is not an exact power of two."""


class ResolutionError(DispersiveLabError):
    """Grid too coarse to resolve the frequency annulus under study."""


class DomainError(DispersiveLabError):
    """Parameter outside the validated domain of a numerical routine."""


class InsufficientDataError(DispersiveLabError):
    """Too few samples to run a fit or a quadrature rule."""


class DegenerateEquationError(DispersiveLabError):
    """Scaling identity does not constrain the requested unknown."""


class DivergenceError(DispersiveLabError):
    """Fixed-point iteration left the stability ball."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class QuadratureCostError(DispersiveLabError):
    """Oscillatory quadrature would exceed the configured node budget."""


class IntegrabilityError(DispersiveLabError):
    """Radial profile is not integrable against the weighted measure."""


class ConfigError(DispersiveLabError):
    """Experiment configuration failed validation (unknown key, bad value)."""

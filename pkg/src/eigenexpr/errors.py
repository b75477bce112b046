"""Exception hierarchy shared by all eigenexpr modules.

Every error raised on purpose by this package derives from EigenExprError,
so callers (and the CLI) can separate data problems from genuine bugs.
"""

from __future__ import annotations


class EigenExprError(Exception):
    """Base class for all errors raised by eigenexpr."""


class ShapeError(EigenExprError, ValueError):
    """Input has the wrong dimensions, is empty, or contains non-finite values."""


class BoundsError(ShapeError):
    """A crop rectangle falls outside the source image."""


class ParameterError(EigenExprError, ValueError):
    """An argument value is outside its allowed range."""


class DegenerateSampleError(EigenExprError, ValueError):
    """Too few observations to form a sample covariance (fewer than 2 rows)."""


class DegenerateRankError(EigenExprError, ValueError):
    """A covariance matrix has fewer than the required number of positive eigenvalues."""


class CoverageError(EigenExprError, ValueError):
    """A required expression or region is missing from a manifest, model, or vote set."""


class ManifestError(EigenExprError, ValueError):
    """A training or evaluation manifest file is malformed."""


class ModelFormatError(EigenExprError, ValueError):
    """A model file cannot be loaded: bad version, truncation, or invariant violation."""


class ImageFormatError(EigenExprError, ValueError):
    """An image file cannot be decoded into a grayscale image."""


class FixtureFormatError(EigenExprError, ValueError):
    """A replay fixture file does not hold a 6x5 grid of distances."""

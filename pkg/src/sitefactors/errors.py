"""Exception hierarchy shared across the package.

The CLI maps these onto its stable exit codes: schema/data problems exit 2,
factor retention failures exit 3, singular correlation matrices exit 4, and
composite/range problems exit 5.
"""


class SiteFactorsError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SiteFactorsError):
    """Input file is not readable as the documented CSV layout."""


class SchemaError(SiteFactorsError):
    """Structurally valid file violating the table schema (duplicates, bad cells)."""


class DegenerateDataError(SiteFactorsError):
    """Too little data for a nonsingular correlation matrix."""


class ZeroVarianceError(SiteFactorsError):
    """An attribute row is constant and cannot be standardized."""


class NoFactorRetainedError(SiteFactorsError):
    """No eigenvalue met the retention threshold at selection time."""


class SingularCorrelationError(SiteFactorsError):
    """Correlation matrix too ill-conditioned to invert (ridge fallback off)."""


class DimensionMismatchError(SiteFactorsError):
    """Matrix operands do not conform."""


class IncompleteDefinitionError(SiteFactorsError):
    """Composite definition does not cover the retained factors exactly."""


class AlphaRangeError(SiteFactorsError):
    """Weighting parameter outside [0, 1]."""


class ZeroDenominatorError(SiteFactorsError):
    """All factor scores of a region are zero; contributions undefined."""


class KRangeError(SiteFactorsError):
    """Requested ranking depth outside [1, number of regions]."""

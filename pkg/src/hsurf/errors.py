"""Exception types shared across the package."""


class HsurfError(Exception):
    """Base class for all package-specific errors."""


class OutOfChartError(HsurfError):
    """A point was handed to a chart evaluation outside the chart disc."""


class NormalizationError(HsurfError):
    """Chart data violates the normalization conditions, or normalization failed."""


class TransversalityError(HsurfError):
    """The coupling scalar q violates the admissibility bound |q| < 1."""


class MeshDomainError(HsurfError):
    """A query point lies outside the triangulated domain."""


class NonConvergenceError(HsurfError):
    """The descent loop failed to reach the requested tolerance."""


class InadmissibleDirectionError(HsurfError):
    """A variation direction violates the admissibility constraints."""


class AmbiguousLiftError(HsurfError):
    """Square-root lifting could not decide between branches at a resolvable point."""


class NoExpansionError(HsurfError):
    """No trial branch order fits the samples acceptably."""


class InsufficientSpanError(HsurfError):
    """Samples do not span enough distance decades for a regression."""


class ScenarioError(HsurfError):
    """A scenario file failed to parse or validate."""

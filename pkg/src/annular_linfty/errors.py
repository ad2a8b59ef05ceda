"""Exception types raised by the library."""


class AnnularError(Exception):
    """Base class for all library errors."""


class MalformedInput(AnnularError):
    """The input document does not follow the APD schema."""


class InvalidDiagram(AnnularError):
    """The diagram data is inconsistent (edge pairing, orientation, winding)."""


class AxisThroughCrossing(AnnularError):
    """Axis data references something other than an existing edge."""


class CapacityExceeded(AnnularError):
    """The generator budget is too small for the requested computation."""


class GradingLeak(AnnularError):
    """An operator entry violates its declared k-degree."""


class NotADifferential(AnnularError):
    """A matrix that should square to zero does not."""


class ContractionInvalid(AnnularError):
    """A chain contraction fails one of its side conditions."""


class RelationFailure(AnnularError):
    """An operator identity that must hold by construction failed."""

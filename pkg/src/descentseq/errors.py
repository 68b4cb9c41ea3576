"""Exception types shared across the package."""


class DescentError(Exception):
    """Base class for all descentseq errors."""


class CompositionNonzero(DescentError):
    """Two consecutive differentials do not compose to zero."""


class NotWellDefined(DescentError):
    """A chain map does not induce a well defined map on cohomology."""


class FieldRequired(DescentError):
    """The operation only makes sense over a field."""


class WindowTooSmall(DescentError):
    """The computed window cannot certify the requested page."""


class TruncationExceeded(DescentError):
    """A simplicial construction needs cells above the stored truncation."""


class NotSurjective(DescentError):
    """Nerve construction requires a levelwise surjective map."""


class HypothesisViolated(DescentError):
    """A connectivity hypothesis the caller asked to certify does not hold."""


class RestrictionEscapes(DescentError):
    """A restricted differential leaves the subgroup it should preserve."""


class SchemaError(DescentError):
    """Malformed input file or builtin name."""

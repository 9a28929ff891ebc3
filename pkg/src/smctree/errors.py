"""Domain errors raised by this package."""


class SmcTreeError(Exception):
    """Base class for all domain errors."""


class InvalidTreeError(SmcTreeError, ValueError):
    """A context set violates the suffix property or irreducibility."""


class SampleTooShortError(SmcTreeError, ValueError):
    """The sample is too short for the requested counting depth."""


class UnobservedContextError(SmcTreeError, ValueError):
    """A context required by an operation never occurs in the sample."""


class DepthExceededError(SmcTreeError, ValueError):
    """A tree is deeper than the counting depth of the trie."""


class InsufficientRenewalPointsError(SmcTreeError, ValueError):
    """The renewal symbol occurs too rarely to form bootstrap blocks."""


class InstanceTooLargeError(SmcTreeError, ValueError):
    """An exhaustive computation was requested on an instance beyond its guard."""


class UnresolvablePastError(SmcTreeError, ValueError):
    """A simulation history has no context in the generating tree."""


class FormatError(SmcTreeError, ValueError):
    """A file or text payload does not match the expected format."""

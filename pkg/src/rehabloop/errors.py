"""Exception hierarchy shared across the package."""


class RehabLoopError(Exception):
    """Base class for all package errors."""


class SpecificationError(RehabLoopError, ValueError):
    """A domain object violates one of its declared invariants."""


class InputError(RehabLoopError, ValueError):
    """Caller-supplied data is malformed (wrong shape, non-finite, ...)."""


class InsufficientDataError(InputError):
    """Not enough signal to compute the requested quantity."""


class ProtocolError(RehabLoopError):
    """An input arrived that is illegal for the current coach phase."""


class DecodeError(RehabLoopError, ValueError):
    """A wire record could not be decoded."""


class EncodeError(RehabLoopError, ValueError):
    """A wire message could not be encoded (e.g. oversize)."""

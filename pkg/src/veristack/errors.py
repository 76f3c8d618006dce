"""Exception hierarchy shared by all veristack modules."""


class VeristackError(Exception):
    """Base class for all toolkit errors."""


class FormatError(VeristackError):
    """A file or payload does not match its declared format."""


class ValidationError(VeristackError):
    """Input data violates a structural invariant (duplicate ids, bad labels, ...)."""


class DataError(VeristackError):
    """Numeric data is unusable (NaN/Inf, undecodable rows)."""


class StateError(VeristackError):
    """An operation was called in a state that does not support it."""

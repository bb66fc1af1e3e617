"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """A parameter is outside the legal range for the operation."""


class HeadroomUnderflow(RuntimeError):
    """A header push needed more headroom than the buffer had."""


class ConfigurationError(RuntimeError):
    """A route or profile could not be resolved."""


class ParseError(ValueError):
    """Malformed header bytes.

    ``field`` names the offending header field and ``offset`` is the byte
    offset where it starts in the input.
    """

    def __init__(self, message, field, offset):
        super().__init__(f"{message} (field {field!r} at offset {offset})")
        self.field = field
        self.offset = offset


class InvariantViolation(RuntimeError):
    """The closed-form prediction and the simulation disagree."""

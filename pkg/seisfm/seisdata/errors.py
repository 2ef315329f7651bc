class SeisDataError(ValueError):
    """Invalid gather, model or generator input."""


class InfeasibleCutError(SeisDataError):
    """No window of the requested size fits below the first break."""


class GatherFormatError(SeisDataError):
    """A native gather file that cannot be read."""


class SegyError(SeisDataError):
    """A SEG-Y file that cannot be parsed; `offset` is the byte position."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = "%s (at byte %d)" % (message, offset)
        super().__init__(message)
        self.offset = offset

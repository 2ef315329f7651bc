class CheckpointError(ValueError):
    """A checkpoint file that cannot be parsed; `offset` is the byte position."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = "%s (at byte %d)" % (message, offset)
        super().__init__(message)
        self.offset = offset


class FreezeViolation(RuntimeError):
    """A frozen parameter received a gradient or changed value."""

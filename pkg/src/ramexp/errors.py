"""Exception hierarchy shared by every module."""


class RamexpError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(RamexpError, ValueError):
    pass


class ResourceLimitError(RamexpError):
    pass


class NotFoundError(RamexpError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class InsufficientDataError(RamexpError):
    pass


class DegenerateInputError(RamexpError, ValueError):
    pass


class PreconditionError(RamexpError, ValueError):
    pass


class VerificationError(RamexpError, AssertionError):
    """An exact identity failed; ``case`` holds a replayable description."""

    def __init__(self, message, case=None):
        super().__init__(message)
        self.case = case

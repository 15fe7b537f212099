"""Exception types shared across the package."""


class InputError(ValueError):
    """An argument violates an operation's precondition."""


class ResourceLimitError(RuntimeError):
    """A configured work cap was exceeded.

    ``partial`` carries whatever was computed before the cap was hit; it is
    never a valid final answer.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
        self.valid = False

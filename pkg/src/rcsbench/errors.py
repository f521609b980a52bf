"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid user input: bad file, bad flag, violated precondition."""


class ResourceLimitError(RuntimeError):
    """A configured resource limit (qubit count, tensor count) was exceeded."""

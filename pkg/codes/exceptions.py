"""Exception hierarchy shared by every app of the simulator."""


class IsingLdpcError(Exception):
    """Base class for all simulator errors."""


class DimensionError(IsingLdpcError, ValueError):
    """A vector or matrix does not have the length the code requires."""


class InvalidExpansionFactor(IsingLdpcError, ValueError):
    pass


class CodeParseError(IsingLdpcError, ValueError):
    """Malformed alist/basegraph-text file. `line` is 1-based."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        location = ''
        if path is not None:
            location += f'{path}:'
        if line is not None:
            location += f'{line}:'
        super().__init__(f'{location} {message}' if location else message)


class CodeIntegrityError(IsingLdpcError, ValueError):
    """The file parses, but its declared structure disagrees with its content."""


class ParameterError(IsingLdpcError, ValueError):
    pass


class ConfigurationError(IsingLdpcError, ValueError):
    pass


class InvariantViolation(IsingLdpcError):
    """An internal consistency check failed (CLI exit code 4)."""

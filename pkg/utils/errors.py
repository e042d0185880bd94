"""
Error types shared across the solver, generator and harness
"""


class OasError(Exception):
    """Base class for every error raised by this package"""


class InputError(OasError, ValueError):
    """Bad problem data or arguments supplied by the caller"""


class ParseError(InputError):
    """Malformed instance or spec file"""

    def __init__(self, message, path=None, line_number=None):
        self.path = path
        self.line_number = line_number
        location = ""
        if path is not None:
            location = f"{path}"
        if line_number is not None:
            location = f"{location}:{line_number}" if location else f"line {line_number}"
        super().__init__(f"{location}: {message}" if location else message)


class ConfigError(OasError, ValueError):
    """Invalid solver configuration or operator selection"""


class ContractViolation(OasError):
    """An algorithm precondition does not hold"""


class SizeLimitError(InputError):
    """Instance too large for the exact oracle"""

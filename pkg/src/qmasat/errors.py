"""Exception hierarchy shared by every module in the package."""


class QmaSatError(Exception):
    """Base class for all package errors."""


class InputError(QmaSatError, ValueError):
    """An argument violates a documented precondition."""


class ParseError(InputError):
    """Malformed text input. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(QmaSatError):
    """An exhaustive computation would exceed its configured bound."""


class StrategyError(QmaSatError):
    """A prover strategy cannot produce proofs for the given instance."""


class ConfigError(InputError):
    """An optical circuit configuration is inconsistent."""


class CompilationError(QmaSatError):
    """No circuit could be compiled for the requested measurement."""

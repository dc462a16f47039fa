"""Exception types shared across the engine.

The CLI maps these onto distinct exit codes, so new error conditions should
reuse one of the classes below rather than raising bare ValueError.
"""


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(EngineError):
    """A text input (graph, trace, model dump, config) failed to parse.

    Carries an optional 1-based line number for diagnostics.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphFormatError(FormatError):
    pass


class ModLogFormatError(FormatError):
    pass


class TraceFormatError(FormatError):
    pass


class ModelFormatError(FormatError):
    pass


class ConfigError(FormatError):
    pass


class ValidationError(EngineError):
    """Inputs are well-formed but violate a semantic precondition."""


class UnknownPageError(EngineError):
    """A URL was requested that is not part of the model."""

    def __init__(self, url):
        self.url = url
        super().__init__(f"unknown page {url}")


class ConvergenceError(EngineError):
    """Iterative ranking failed to reach the requested tolerance."""

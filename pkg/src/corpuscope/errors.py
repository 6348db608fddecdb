"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, ResourceError -> 3,
NumericError -> 4. Everything else is a plain bug and propagates.
"""


class CorpuscopeError(Exception):
    """Base class for all package errors."""


class ConfigError(CorpuscopeError):
    """Invalid configuration: bad parameters, missing features, bad paths."""


class ResourceError(CorpuscopeError):
    """An external resource file is missing or malformed."""


class ParseError(ResourceError):
    """A resource file failed to parse; message carries the location."""

    def __init__(self, message, path=None, line=None):
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        elif path is not None:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line


class EmptyDocumentError(CorpuscopeError):
    """A document file contained no usable text."""


class NumericError(CorpuscopeError):
    """A numeric routine could not produce a result (rank, convergence)."""

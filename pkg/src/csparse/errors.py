"""Exception types shared across the package."""


class DataError(Exception):
    """Malformed or inconsistent input data (files, corpora, model files)."""


class ConlluError(DataError):
    """CoNLL-U parsing failure; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ModelError(DataError):
    """Model file cannot be read or does not match the requesting class."""

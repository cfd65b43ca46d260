"""Error types shared across the package."""


class CrosscommError(Exception):
    """Base class for data and algorithm errors (CLI exit code 2)."""


class ParseError(CrosscommError, ValueError):
    """Malformed input file. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AlignmentError(CrosscommError, ValueError):
    """Invalid seed/alignment pair (missing label, duplicate side, not a matching)."""


class ConvergenceError(CrosscommError, RuntimeError):
    """Iteration budget exhausted before reaching tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual

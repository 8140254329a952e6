"""Exception types shared across the package.

The CLI maps these onto exit codes: plain ``ValueError`` (argument misuse)
exits 2, ``DataError`` exits 3, ``NumericalError`` exits 4.
"""


class DataError(Exception):
    """Input data cannot be used: parse failures, empty graphs, invalid models."""


class ParseError(DataError):
    """A text input (edge list, label file, config) is malformed."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ModelValidityError(DataError):
    """Parameters fall outside the generative model's admissible range."""


class NumericalError(Exception):
    """A numerical routine could not produce a trustworthy result."""


class NonConvergenceError(NumericalError):
    """Eigensolver failed to converge; carries the best residuals reached."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class DegeneracyError(NumericalError):
    """A spectral quantity is degenerate (non-simple eigenvalue, zero entry)."""

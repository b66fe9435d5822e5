"""mfcz exceptions and warnings"""


class MFCZBaseException(Exception):
    """Base class for all mfcz exceptions."""


class MFCZBaseWarning(Warning):
    """Base class for all mfcz warnings."""


class MFCZInvalidParameter(MFCZBaseException):
    """Raised if a parameter is invalid."""


class MFCZDimensionMismatch(MFCZBaseException):
    """Raised if grid, frequency or box dimensions disagree."""


class MFCZGramError(MFCZBaseException):
    """Raised if a Gram system cannot be solved even after regularization."""

    def __init__(self, message, clustered_pairs=None):
        super().__init__(message)
        self.clustered_pairs = clustered_pairs or []


class MFCZConvergenceError(MFCZBaseException):
    """Raised if an iterative method does not converge."""

    def __init__(self, message, best_iterate=None, history=None):
        super().__init__(message)
        self.best_iterate = best_iterate
        self.history = history or []


class MFCZCardinalityError(MFCZBaseException):
    """Raised if a sumset exceeds the configured cardinality cap."""


class MFCZResolutionError(MFCZBaseException):
    """Raised if the grid cannot resolve a request (empty box, wraparound, aliasing)."""


class MFCZInvalidOperation(MFCZBaseException):
    """Raised if a requested operation is not applicable."""


class MFCZInvalidExperiment(MFCZBaseException):
    """Raised if an experiment name or configuration is invalid."""


class MFCZInvalidFile(MFCZBaseException):
    """Raised if a file cannot be read."""


class MFCZRuntimeError(MFCZBaseException):
    """Raised if there was a generic runtime error."""

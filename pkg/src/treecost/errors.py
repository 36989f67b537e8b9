"""Exception types shared across the package."""


class TreecostError(Exception):
    """Base class for all package-specific errors."""


class TreeInvariantError(TreecostError):
    """A structure violates the directed-tree invariants."""


class InvalidCodeError(TreecostError):
    """An extended Pruefer code contains an out-of-range symbol."""


class UnsupportedSizeError(TreecostError):
    """Operation invoked outside its supported vertex-count range."""


class DegenerateSizeError(TreecostError):
    """Normalization requested for a size where the extrema coincide."""


class ConvergenceError(TreecostError):
    """Iterative eigenvalue computation failed to converge."""


class InsufficientSampleError(TreecostError):
    """Too few samples for the requested statistic."""


class DegenerateDistributionError(TreecostError):
    """A covariance (or difference distribution) is singular."""


class DegenerateLabelsError(TreecostError):
    """Classifier training data does not contain both classes."""


class SampleSizeError(TreecostError):
    """Requested subsample exceeds the available sample."""


class ConlluParseError(TreecostError):
    """Malformed CONLL-U input."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = "line %d: %s" % (line_number, message)
        super().__init__(message)
        self.line_number = line_number

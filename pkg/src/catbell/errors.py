"""Exception types shared across the package."""


class CatbellError(Exception):
    """Base class for all catbell errors."""


class TruncationTooSmall(CatbellError):
    """The number-basis cutoff leaves too much probability in the tail."""


class DimensionMismatch(CatbellError):
    """Operands live in incompatible truncated spaces."""


class GridTooSmall(CatbellError):
    """A quadrature grid fails to cover the state's support."""


class ZeroProbability(CatbellError):
    """A projective outcome has vanishing probability."""

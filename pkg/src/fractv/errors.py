"""Exception types raised across the package."""


class FracTVError(Exception):
    """Base class for all errors raised by fractv."""


class InvalidParameterError(FracTVError, ValueError):
    """A parameter is outside its admissible range or has the wrong shape."""


class InvalidInputError(FracTVError, ValueError):
    """Input data cannot be processed (all-zero reference, NaN, ...)."""


class UnsupportedOperatorError(FracTVError, ValueError):
    """The operator is not normal and cannot be unitarily diagonalized."""


class ParseError(FracTVError):
    """A data file does not follow the expected CSV layout."""

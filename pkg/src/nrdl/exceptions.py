"""Exception types raised by nrdl."""


class NRDLError(Exception):
    """Base class for all nrdl errors."""


class DataError(NRDLError, ValueError):
    """Malformed input data: bad files, shapes, labels or values."""


class NumericalError(NRDLError, ArithmeticError):
    """A linear system could not be solved or produced non-finite values."""

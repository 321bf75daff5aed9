"""Exception hierarchy shared by all modules."""


class CensoredMMDError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateCensoringError(CensoredMMDError):
    """Censored point so close to 1 that its weight interval collapses."""


class DimensionMismatchError(CensoredMMDError):
    """Vector or matrix arguments with incompatible sizes."""


class InvalidModelError(CensoredMMDError):
    """Null model whose CDF is out of range or non-monotone on the data."""


class EmptyCellError(CensoredMMDError):
    """A chi-square cell with zero expected mass."""

    def __init__(self, cell_index: int, message: str | None = None):
        self.cell_index = cell_index
        super().__init__(message or f"expected frequency is zero in cell {cell_index}")


class ZeroVarianceError(CensoredMMDError):
    """Test statistic with a numerically zero variance estimate."""


class NoSolutionError(CensoredMMDError):
    """Censoring calibration target unreachable within the search bracket."""


class RootNotBracketedError(CensoredMMDError):
    """Internal root-finder invariant violation; should be unreachable."""


class DatasetFormatError(CensoredMMDError):
    """Malformed dataset file; carries the offending row number."""

    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}")

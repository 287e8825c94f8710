"""Exception types shared across the package."""


class GridlineError(Exception):
    """Base class for all errors raised by this package."""


class CaseError(GridlineError):
    """A case file is missing, malformed, or internally inconsistent.

    Carries the offending file name and (1-based, header excluded) row
    number whenever they are known.
    """

    def __init__(self, message, file=None, row=None):
        self.file = file
        self.row = row
        where = ""
        if file is not None:
            where = f" [{file}" + (f", row {row}" if row is not None else "") + "]"
        super().__init__(message + where)


class WeatherError(GridlineError):
    """Weather file malformed, inconsistent, or queried out of range."""


class ProjectionError(GridlineError):
    """Coordinates outside the supported projection domain."""


class RatingCollapseError(GridlineError):
    """Ambient temperature at or above the conductor limit: the thermal
    rating would drop to zero, which would silently island the branch.
    Refused so operators see it."""


class NetworkStructureError(GridlineError):
    """Network not usable for sensitivity analysis (e.g. disconnected)."""


class SolverError(GridlineError):
    """The LP backend returned an unusable status or an optimal solution
    that fails the independent feasibility audit."""

"""Exception hierarchy shared by all garagemap modules."""


class GarageMapError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(GarageMapError):
    """Malformed input file. Carries the byte offset where parsing failed."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class GeometryError(GarageMapError):
    """Degenerate or invalid geometric input."""


class SingularFitError(GeometryError):
    """Least-squares fit is rank deficient (e.g. collinear control points)."""


class BoundsError(GarageMapError):
    """A point or index falls outside a grid extent. Carries the offending cell."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class StoreLoadError(GarageMapError):
    """A persisted store file failed validation. Names file and line."""

    def __init__(self, message, filename=None, line=None):
        if filename is not None:
            where = filename if line is None else f"{filename}:{line}"
            message = f"{where}: {message}"
        super().__init__(message)
        self.filename = filename
        self.line = line


class NotFoundError(GarageMapError):
    """A lookup (record id, nearest match) produced no result."""


class ConfigError(GarageMapError):
    """Invalid configuration value or file."""


class PlacementError(GarageMapError):
    """Route start or goal lies on an occupied cell."""


class UnreachableError(GarageMapError):
    """No route exists between start and goal."""

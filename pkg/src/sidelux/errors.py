"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Invalid or degenerate geometric input."""


class DegenerateMeshError(GeometryError):
    """A workplane mesh would contain no cell centers."""


class DataError(ValueError):
    """Physically inconsistent or missing input data."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(DataError):
    """Malformed input file content."""


class ConfigError(ValueError):
    """Invalid building or simulation configuration."""


class MetricError(ValueError):
    """A statistical indicator is undefined for the given series."""

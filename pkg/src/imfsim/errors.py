"""Exception types shared across the package."""


class ImfsimError(Exception):
    """Base class for all package errors."""


class MalformedLineError(ImfsimError):
    """An event-stream line could not be parsed. Carries the 1-based line number."""

    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        msg = f"malformed event line {line_no}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NonMonotonicTimestampError(ImfsimError):
    """Event timestamps must be non-decreasing. Carries the offending line number."""

    def __init__(self, line_no: int):
        self.line_no = line_no
        super().__init__(f"timestamp decreases at event line {line_no}")


class OutOfBoundsError(ImfsimError):
    """An event lies outside the configured sensor dimensions."""


class InvalidCountError(ImfsimError):
    """A pixel count is impossible for the kernel it was quoted against."""


class InvalidParamsError(ImfsimError):
    """A configuration or parameter object violates its invariants."""


class DimensionMismatchError(ImfsimError):
    """Array or geometry dimensions are incompatible with the requested operation."""

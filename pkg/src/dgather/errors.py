"""Exception types raised across the package."""


class DGatherError(Exception):
    """Base class for all package errors."""


class InvalidGeometry(DGatherError, ValueError):
    """A geometric construction was asked for on degenerate input."""


class InvalidInput(DGatherError, ValueError):
    """Arguments violate an operation's preconditions."""


class ScriptError(DGatherError):
    """A scripted visibility record is missing or not a legal view."""


class TraceFormatError(DGatherError, ValueError):
    """A trace file or in-memory trace does not have the expected shape."""


class ResourceLimit(DGatherError):
    """A requested search would exceed the configured work bound."""

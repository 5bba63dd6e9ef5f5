"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: configuration / parse
problems exit 2, infeasible analyses exit 3, I/O failures exit 4.
"""


class MrmLinkError(Exception):
    """Base class for all mrmlink errors."""


class InvalidArgumentError(MrmLinkError, ValueError):
    """An argument is out of its physical or numerical range."""


class DegenerateResponseError(MrmLinkError):
    """The device response is flat; the requested feature does not exist."""


class WindowUnreachableError(MrmLinkError):
    """The transfer curve never traverses the requested gain window."""


class InfeasibleSearchError(MrmLinkError):
    """No seed point of the optimizer search evaluates to a finite objective."""


class ConfigError(MrmLinkError):
    """A run-config file violates the schema or a physical invariant."""


class DataParseError(ConfigError):
    """A measured-data file is malformed; message carries the row number."""

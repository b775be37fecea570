"""Exception hierarchy shared across the package."""


class ClearSkyError(Exception):
    """Base class for all package errors."""


class InputError(ClearSkyError, ValueError):
    """Invalid argument values, malformed files, grid mismatches."""


class CapabilityError(ClearSkyError):
    """A model was asked for a configuration outside its supported scope."""


class NumericError(ClearSkyError):
    """Ill-conditioned or failed numeric computation."""

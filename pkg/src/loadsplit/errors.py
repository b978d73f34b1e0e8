"""Exception types shared across the package."""


class LoadSplitError(Exception):
    """Base class for all loadsplit errors."""


class DimensionMismatchError(LoadSplitError):
    """Model or data components disagree on matrix dimensions."""


class ConfigError(LoadSplitError):
    """Invalid model, appliance, or generator configuration."""


class DataError(LoadSplitError):
    """Malformed or unusable input data (CSV rows, incomplete days, files)."""


class NumericalError(LoadSplitError):
    """Training produced a non-finite objective or otherwise diverged."""

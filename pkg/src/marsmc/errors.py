"""Exception types shared across the package."""


class MarsmcError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(MarsmcError):
    """Invalid or inconsistent run configuration."""


class DataFormatError(MarsmcError):
    """Malformed input data file."""


class SamplingError(MarsmcError):
    """A rejection sampler exhausted its attempt budget."""


class DegeneracyError(MarsmcError):
    """All particle weights collapsed to zero during reweighting."""

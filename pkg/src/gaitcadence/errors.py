"""Exception hierarchy shared across the package."""


class CadenceError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(CadenceError, ValueError):
    """An argument is outside its documented domain."""


class StructuralError(CadenceError, ValueError):
    """Inputs have inconsistent shapes or malformed structure."""


class DataFormatError(CadenceError):
    """An input file or data stream violates its declared format."""


class ModelValidationError(ParameterError):
    """A walking-model specification violates one of its conditions."""


class ConfigError(CadenceError):
    """A configuration file or option set is invalid."""

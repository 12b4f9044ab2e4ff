class AjsccError(Exception):
    """Base class for simulator errors."""


class ConfigError(AjsccError, ValueError):
    """Invalid or unsupported configuration value."""


class DomainError(AjsccError, ValueError):
    """Input outside the domain an operation accepts."""


class DeviceOffError(DomainError):
    pass


class InversionError(DomainError):
    pass


class DegeneratePairError(DomainError):
    """Two equal currents: the two-point slope is undefined."""

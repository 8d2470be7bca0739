"""Exception types shared across the package."""


class ZfireError(Exception):
    """Base class for package errors."""


class ConfigError(ZfireError):
    """Invalid model or ensemble configuration."""


class ResourceLimit(ZfireError):
    """A hard resource guard tripped (site cap or event cap)."""


class DomainError(ZfireError):
    """Argument outside the mathematical domain of a formula."""


class PreconditionViolation(ZfireError):
    """An operation was invoked in a state its contract forbids."""


class NoInfiniteFire(ZfireError):
    """A sheared continuation was requested but no infinite fire occurred."""


class EmptyEnsemble(ZfireError):
    """An ensemble with zero replications was requested."""


class InsufficientData(ZfireError):
    """Too few observations to run the requested statistic."""


class EmptyWindow(ZfireError):
    """A render window containing no events."""

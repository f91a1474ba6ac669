"""Exception hierarchy shared by all modules."""


class WiretapError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(WiretapError, ValueError):
    """An argument violates a documented precondition."""


class SchemeInapplicableError(InvalidInputError):
    """The transmission scheme is undefined for this antenna configuration."""


class DomainError(WiretapError, ValueError):
    """A multiplexing gain lies outside the domain of a tradeoff curve."""


class FitUnavailableError(WiretapError, RuntimeError):
    """Too few grid points qualify for a slope fit."""


class ConfigError(WiretapError, ValueError):
    """An experiment configuration failed validation."""


class UnsupportedSizeError(WiretapError, ValueError):
    """Antenna counts are outside the range a routine supports."""

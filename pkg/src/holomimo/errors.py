"""Exception types shared by the library and the CLI."""


class HoloMimoError(Exception):
    """Base class for all library errors."""


class DomainError(HoloMimoError, ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalError(HoloMimoError, ArithmeticError):
    """A numerical step failed (non-PD matrix, singular system, ...).

    ``where`` names the module and operation, e.g. ``"matching.synthesize_noise_matching"``;
    the CLI reports it with exit code 3.
    """

    def __init__(self, where, message):
        super().__init__(f"{where}: {message}")
        self.where = where


class ConfigError(HoloMimoError, ValueError):
    """Malformed configuration; ``key`` is the dotted name of the offending entry."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key

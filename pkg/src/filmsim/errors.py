"""Exception hierarchy shared by the solver modules and the CLI."""


class FilmsimError(Exception):
    """Base class for all errors raised by filmsim."""


class DomainError(FilmsimError, ValueError):
    """An input lies outside the domain where a formula is defined (e.g. h <= 0)."""


class ConfigError(FilmsimError, ValueError):
    """Invalid or inconsistent configuration."""


class StateError(FilmsimError, ValueError):
    """A simulation state violates a physical invariant."""


class IntegrationError(FilmsimError, RuntimeError):
    """The time integrator could not advance the solution."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t

"""Two-layer thin-film model with a gap-tooth patch scheme."""

from .errors import ConfigError, DomainError, FilmsimError, IntegrationError, StateError
from .model import ModelParams

__all__ = ["ConfigError", "DomainError", "FilmsimError", "IntegrationError", "StateError",
           "ModelParams"]
__version__ = "0.1.0"

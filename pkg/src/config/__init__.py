from .settings import NumericsSettings, apply_overrides, get_settings, reset_settings
from .logging_setup import configure_logging

__all__ = ["NumericsSettings", "apply_overrides", "get_settings", "reset_settings", "configure_logging"]

from .logging_setup import LOG_FORMAT, resolve_log_level, setup_logging

__all__ = ["LOG_FORMAT", "resolve_log_level", "setup_logging"]

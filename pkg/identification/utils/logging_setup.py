import logging
from typing import Optional

from config.paths import SYSID_LOG_LEVEL

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def resolve_log_level(level: Optional[str] = None) -> int:
    """--log-level, else SYSID_LOG_LEVEL, else INFO. Unknown names fall back to INFO."""
    resolved = logging.getLevelName((level or SYSID_LOG_LEVEL or "INFO").upper())
    return resolved if isinstance(resolved, int) else logging.INFO


def setup_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(level=resolve_log_level(level), format=LOG_FORMAT, force=True)

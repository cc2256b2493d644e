from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

PROJECT_ROOT = Path(__file__).resolve().parents[1]

# relative values resolve against the project root
SYSID_OUTPUT_DIR = PROJECT_ROOT / os.getenv("SYSID_OUTPUT_DIR", "runs")
SYSID_LOG_LEVEL = os.getenv("SYSID_LOG_LEVEL", "INFO").upper()


def max_workers_from_env() -> int | None:
    """SYSID_MAX_WORKERS as an int; None (CPU count) when unset or not a positive integer."""
    raw = os.getenv("SYSID_MAX_WORKERS")
    if raw is None or not raw.strip().isdigit() or int(raw) < 1:
        return None
    return int(raw)


SYSID_MAX_WORKERS = max_workers_from_env()

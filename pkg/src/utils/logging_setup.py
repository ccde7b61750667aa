"""
Logging to a timestamped file under <output_base>/logs/ plus the console.

Console: INFO and WARNING go to stdout, ERROR and above to stderr.
"""

from __future__ import annotations

import logging
import sys
from datetime import datetime
from pathlib import Path

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


class _BelowError(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        return record.levelno < logging.ERROR


def setup_logging(log_dir: Path, name: str, level: str = "INFO") -> logging.Logger:
    """Setup logging to file and console; safe to call more than once per process."""
    log_dir.mkdir(parents=True, exist_ok=True)
    stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_file = log_dir / f"{name}_{stamp}.log"

    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    logger.propagate = False
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    stdout_handler = logging.StreamHandler(sys.stdout)
    stdout_handler.addFilter(_BelowError())
    stderr_handler = logging.StreamHandler(sys.stderr)
    stderr_handler.setLevel(logging.ERROR)

    formatter = logging.Formatter(LOG_FORMAT)
    for handler in (logging.FileHandler(log_file, encoding="utf-8"), stdout_handler, stderr_handler):
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    return logger

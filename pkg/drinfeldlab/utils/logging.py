"""Logging helper.

One namespaced logger writing to stdout in a pipe-separated format. Library
modules call `get_logger()` with no arguments; the CLI calls it first with the
configured level and optional file path. Reports never go through the logger,
so stdout noise cannot change a JSON report.
"""

import logging
import sys
from pathlib import Path
from typing import Optional


LOGGER_NAME = "drinfeldlab"
LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _parse_level(level: Optional[str]) -> int:
    return getattr(logging, (level or "INFO").upper(), logging.INFO)


def _attach_file(logger: logging.Logger, file_path: str, formatter: logging.Formatter) -> None:
    log_path = Path(file_path)
    try:
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path, encoding="utf-8")
    except OSError:
        logger.warning("cannot open log file %s; logging to stdout only", log_path)
        return
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)


def get_logger(level: Optional[str] = None, file_path: Optional[str] = None) -> logging.Logger:
    """Return the application logger, configuring it on first use.

    Later calls reuse the existing handlers; an explicit `level` still updates
    the threshold so the CLI can raise or lower verbosity after import.
    """
    logger = logging.getLogger(LOGGER_NAME)
    if logger.handlers:
        if level:
            logger.setLevel(_parse_level(level))
        return logger

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)
    stream = logging.StreamHandler(sys.stdout)
    stream.setFormatter(formatter)
    logger.addHandler(stream)
    logger.setLevel(_parse_level(level))
    logger.propagate = False
    if file_path:
        _attach_file(logger, file_path, formatter)
    return logger

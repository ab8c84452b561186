"""Logging helpers used across pdmesh."""

from __future__ import annotations

import logging

_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"


def _ensure_configured(level: int) -> None:
    if logging.getLogger().handlers:
        return
    logging.basicConfig(level=level, format=_FORMAT)


def get_logger(name: str, *, level: int = logging.INFO) -> logging.Logger:
    """Return a named logger, configuring the root logger on first use."""

    _ensure_configured(level)
    logger = logging.getLogger(f"pdmesh.{name}")
    if logger.level == logging.NOTSET:
        logger.setLevel(level)
    return logger


def set_level(level: int) -> None:
    """Apply *level* to the root logger and every pdmesh logger created so far."""

    logging.getLogger().setLevel(level)
    for name, logger in logging.Logger.manager.loggerDict.items():
        if name.startswith("pdmesh.") and isinstance(logger, logging.Logger):
            logger.setLevel(level)

"""Logging setup backed by rich."""

import logging

from rich.console import Console
from rich.logging import RichHandler

ROOT = "reconfnet"
LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


def get_logger(name: str) -> logging.Logger:
    if not name.startswith(ROOT):
        name = f"{ROOT}.{name}"
    return logging.getLogger(name)


def setup(verbosity: int = 0) -> logging.Logger:
    """Install a single stderr RichHandler on the package logger."""
    logger = logging.getLogger(ROOT)
    logger.setLevel(LEVELS[max(0, min(verbosity, len(LEVELS) - 1))])
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(
            console=Console(stderr=True),
            show_path=False,
            markup=False,
            rich_tracebacks=True,
        )
        handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
        logger.addHandler(handler)
    logger.propagate = False
    return logger

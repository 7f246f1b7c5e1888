"""Logging configuration for the command-line tool.

Library modules only create loggers; handlers are installed here, rendering
through rich on the error stream so that standard output stays reserved
for data.
"""

from __future__ import annotations

import logging

from rich.console import Console
from rich.logging import RichHandler
from rich.theme import Theme

PACKAGE_LOGGER = "epbeam"

EPBEAM_THEME = Theme(
    {
        "error": "bold red",
        "warning": "yellow",
        "info": "cyan",
        "success": "green",
    }
)


def make_console() -> Console:
    """Console bound to standard error."""
    return Console(stderr=True, theme=EPBEAM_THEME, highlight=False)


def verbosity_level(verbosity: int) -> int:
    if verbosity <= 0:
        return logging.WARNING
    if verbosity == 1:
        return logging.INFO
    return logging.DEBUG


def configure_logging(verbosity: int = 0, console: Console | None = None) -> logging.Logger:
    """Route package logs through a RichHandler; repeated calls replace it."""
    handler = RichHandler(
        console=console or make_console(),
        show_path=False,
        show_time=verbosity >= 2,
        markup=False,
        rich_tracebacks=True,
    )
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))

    logger = logging.getLogger(PACKAGE_LOGGER)
    for existing in list(logger.handlers):
        logger.removeHandler(existing)
    logger.addHandler(handler)
    logger.setLevel(verbosity_level(verbosity))
    logger.propagate = False
    return logger

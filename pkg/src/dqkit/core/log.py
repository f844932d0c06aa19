"""Logging setup for the dqkit command line."""

from __future__ import annotations

import logging

from rich.console import Console
from rich.logging import RichHandler

LOGGER_NAME = "dqkit"


def setup_logging(verbose: bool = False) -> logging.Logger:
    """
    Route the ``dqkit`` logger to stderr through rich.

    Library modules only call ``logging.getLogger(__name__)``; this is the
    single place that attaches a handler. Calling it twice replaces the
    previous handler.
    """
    logger = logging.getLogger(LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = RichHandler(
        console=Console(stderr=True),
        show_path=verbose,
        rich_tracebacks=verbose,
        markup=False,
    )
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    logger.propagate = False
    return logger

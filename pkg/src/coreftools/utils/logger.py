"""The logger module provides wrapper functions to log errors, warnings and progress."""

import logging
import sys

LOGGER_NAME = "coreftools"
"""
Name of the package logger. All diagnostics go through it to standard error.
"""

logger = logging.getLogger(LOGGER_NAME)


def configure_logging(level: str = "INFO"):
    """Attach a single standard error handler to the package logger.

    Calling this more than once only changes the level and moves the handler to the
    current ``sys.stderr``.

    :param level: A ``logging`` level name such as ``"DEBUG"`` or ``"WARNING"``.
    :raise ValueError: If ``level`` is not a known level name.
    """
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ValueError(f"unknown log level '{level}'")
    logger.setLevel(numeric)
    logger.propagate = False
    if not any(getattr(h, "_coreftools", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
        handler._coreftools = True
        logger.addHandler(handler)
    for handler in logger.handlers:
        if not getattr(handler, "_coreftools", False) or handler.stream is sys.stderr:
            continue
        # setStream flushes the old stream, which may be closed by now
        if getattr(handler.stream, "closed", False):
            handler.stream = sys.stderr
        else:
            handler.setStream(sys.stderr)


def log_error(ex: Exception, context: str):
    """Log a caught exception.

    :param ex: The thrown exception.
    :param context: The context in which the exception was thrown.
    """
    logger.error(f"Error in context '{context}': {str(ex)}")


def log_warning(message: str):
    """Log a warning message.

    :param message: The warning message.
    """
    logger.warning(message)


def log_info(message: str):
    logger.info(message)


def log_debug(message: str):
    logger.debug(message)

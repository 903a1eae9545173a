# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
import logging
import sys

import structlog

from lenslab.config import ConfigFile
from lenslab.config import Settings
from lenslab.config import get_config_file
from lenslab.exceptions import InvalidParams

logger = structlog.stdlib.get_logger()


def configure_logging(log_level: str) -> None:
    """Key/value logs at log_level and above, rendered to stderr.

    Stdout is left alone; it carries the command output.
    """
    levels = logging.getLevelNamesMapping()
    level = levels.get(log_level.upper())
    if level is None:
        raise InvalidParams(f"Unknown log level {log_level!r}")
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def setup(settings: Settings) -> ConfigFile:
    configure_logging(settings.log_level)
    logger.debug("Loading config file", config_file=str(settings.config_file))
    return get_config_file(settings.config_file)

"""Logging setup for the command-line tool."""

import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(verbosity: int = 0) -> None:
    """Configure root logging on stderr.

    Args:
        verbosity: 0 warnings only, 1 info, 2 or more debug
    """
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)
    logging.getLogger("src").setLevel(level)

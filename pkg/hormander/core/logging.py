"""
Logging setup on top of loguru
"""
import sys

from loguru import logger

LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} - {extra[component]} - {level} - {message}"

logger.configure(extra={"component": "hormander"})


def setup_logging(level: str = "INFO", json: bool = False) -> None:
    """Replace the default sink with a single stderr sink"""
    logger.remove()
    if json:
        logger.add(sys.stderr, level=level.upper(), serialize=True)
    else:
        logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)


def get_logger(component: str):
    """Logger bound to a component name"""
    return logger.bind(component=component)

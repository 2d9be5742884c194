import logging
import os
from logging.handlers import RotatingFileHandler

LOG_LEVELS = {
    "notset": logging.NOTSET,
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "warn": logging.WARNING,
    "error": logging.ERROR,
    "critical": logging.CRITICAL,
}


def setup_logger(
    name: str,
    level: str = os.getenv("LOGGING_LEVEL", "info"),
    log_filename: str = None,
    max_log_size: int = 10 * 1024 * 1024,  # 10 MB
    backup_count: int = 3,
) -> logging.Logger:
    """
    Set up a named logger writing to stderr and, optionally, to a rotating file.

    Calling it again for the same name only adds handlers that are not there yet, so
    module-level loggers and the CLI can both call it safely.

    Args:
        name (str): Name of logger
        level (str): os.getenv("LOGGING_LEVEL"). Defaults to 'info'.
        log_filename (str): Name and Path of log file.
        max_log_size (int): Defaults to 10MB
        backup_count (int): Default to 3

    Return:
        Logger Object
    """
    logger = logging.getLogger(name)

    formatter = logging.Formatter(
        fmt="{asctime} {name}.{funcName} {levelname} {message}",
        datefmt="%Y%m%d %H:%M:%S",
        style="{",
    )

    if log_filename and not any(
        isinstance(h, RotatingFileHandler)
        and h.baseFilename == os.path.abspath(log_filename)
        for h in logger.handlers
    ):
        handler_file = RotatingFileHandler(
            log_filename,
            maxBytes=max_log_size,
            backupCount=backup_count,
        )
        handler_file.setFormatter(formatter)
        logger.addHandler(handler_file)

    if not any(type(h) is logging.StreamHandler for h in logger.handlers):
        handler_stream = logging.StreamHandler()
        handler_stream.setFormatter(formatter)
        logger.addHandler(handler_stream)

    logger.setLevel(LOG_LEVELS.get(level.lower(), logging.INFO))

    return logger


def configure_package_loggers(
    package: str,
    level: str = None,
    log_filename: str = None,
) -> list:
    """
    Re-apply a level, and an optional log file, to every logger already created under ``package``.

    Module-level loggers read LOGGING_LEVEL when the package is imported; call this after
    ``load_dotenv()`` so a level set in ``.env`` takes effect.

    Args:
        package (str): Top-level package name
        level (str): Defaults to os.getenv("LOGGING_LEVEL", "info") at call time
        log_filename (str): Name and Path of log file.

    Return:
        List of the logger names touched
    """
    level = level or os.getenv("LOGGING_LEVEL", "info")
    names = sorted(
        n for n in logging.root.manager.loggerDict if n == package or n.startswith(package + ".")
    )
    for name in names:
        setup_logger(name=name, level=level, log_filename=log_filename)

    return names

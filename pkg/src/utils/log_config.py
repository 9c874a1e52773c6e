"""
Logging configuration for command-line runs.

Library modules only obtain loggers with logging.getLogger(__name__); the
CLI installs handlers once through FingerprintLogger.
"""

import logging
import logging.handlers
import sys
from pathlib import Path

from src.config import LoggingSettings

PACKAGE_LOGGERS = ("src", "scripts")

FORMATS = {
    "json": (
        '{"timestamp": "%(asctime)s", "level": "%(levelname)s", '
        '"module": "%(name)s", "message": "%(message)s", '
        '"function": "%(funcName)s", "line": %(lineno)d}'
    ),
    "structured": (
        "%(asctime)s | %(levelname)-8s | %(name)-28s | "
        "%(funcName)-20s:%(lineno)-4d | %(message)s"
    ),
    "simple": "%(asctime)s - %(levelname)s - %(message)s",
}


class FingerprintLogger:
    """Structured console and rotating-file logging for the toolkit."""

    def __init__(self, config: LoggingSettings, name: str = "variant_fingerprint"):
        self.config = config
        self.logger = logging.getLogger(name)
        self.setup_logging()

    def _handlers(self) -> list[logging.Handler]:
        formatter = logging.Formatter(FORMATS[self.config.format])

        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setFormatter(formatter)
        handlers: list[logging.Handler] = [console_handler]

        if self.config.file_path:
            log_path = Path(self.config.file_path)
            log_path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.handlers.RotatingFileHandler(
                log_path,
                maxBytes=self.config.max_file_size,
                backupCount=self.config.backup_count,
                encoding="utf-8",
            )
            file_handler.setFormatter(formatter)
            handlers.append(file_handler)
        return handlers

    def setup_logging(self):
        """Attach fresh handlers to the CLI logger and the package loggers."""
        level = getattr(logging, self.config.level.upper())
        handlers = self._handlers()

        for logger in [self.logger, *map(logging.getLogger, PACKAGE_LOGGERS)]:
            for handler in list(logger.handlers):
                logger.removeHandler(handler)
                handler.close()
            logger.setLevel(level)
            logger.propagate = False
            for handler in handlers:
                logger.addHandler(handler)

    def get_logger(self) -> logging.Logger:
        """Get the configured logger instance."""
        return self.logger

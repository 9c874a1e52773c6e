"""
Tests for CLI logging configuration.
"""

import json
import logging

import pytest

from src.config import LoggingSettings
from src.utils.log_config import FORMATS, PACKAGE_LOGGERS, FingerprintLogger


class TestFingerprintLogger:
    """Test suite for FingerprintLogger."""

    def test_console_handler(self):
        logger = FingerprintLogger(LoggingSettings(level="WARNING")).get_logger()

        assert logger.name == "variant_fingerprint"
        assert logger.level == logging.WARNING
        assert len(logger.handlers) == 1

    def test_package_loggers_share_handlers(self):
        logger = FingerprintLogger(LoggingSettings()).get_logger()
        for name in PACKAGE_LOGGERS:
            package_logger = logging.getLogger(name)
            assert package_logger.handlers == logger.handlers
            assert package_logger.propagate is False

    def test_repeated_setup_does_not_duplicate(self):
        FingerprintLogger(LoggingSettings())
        logger = FingerprintLogger(LoggingSettings()).get_logger()
        assert len(logger.handlers) == 1

    def test_file_handler(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        logger = FingerprintLogger(
            LoggingSettings(file_path=str(log_file), format="simple")
        ).get_logger()

        logging.getLogger("src.analysis.selection").info("selection started")
        for handler in logger.handlers:
            handler.flush()

        assert len(logger.handlers) == 2
        assert "selection started" in log_file.read_text()

    def test_json_format(self, tmp_path):
        log_file = tmp_path / "run.log"
        logger = FingerprintLogger(
            LoggingSettings(file_path=str(log_file), format="json")
        ).get_logger()

        logger.info("hello")
        for handler in logger.handlers:
            handler.flush()

        record = json.loads(log_file.read_text().splitlines()[-1])
        assert record["message"] == "hello"
        assert record["level"] == "INFO"

    @pytest.mark.parametrize("name", ["simple", "structured", "json"])
    def test_formats_defined(self, name):
        assert "%(message)s" in FORMATS[name]

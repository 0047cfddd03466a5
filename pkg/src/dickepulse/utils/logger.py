"""
Logging utilities for dickepulse
"""

import logging
import logging.handlers
import sys
from pathlib import Path
from typing import Optional

from ..core.config import LoggingConfig


def setup_logging(config: LoggingConfig, debug: bool = False) -> None:
    """
    Setup logging configuration for dickepulse

    Console output goes to stderr so that tables and CSV written to stdout
    stay machine readable.

    Args:
        config: Logging configuration
        debug: Enable debug mode (overrides config level)
    """
    level = logging.DEBUG if debug else getattr(logging, config.level.upper())

    formatter = logging.Formatter(config.format)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    if config.console_output:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(level)
        console_handler.setFormatter(formatter)
        root_logger.addHandler(console_handler)

    if config.file_path:
        log_path = Path(config.file_path)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        max_bytes = _parse_file_size(config.max_file_size)

        file_handler = logging.handlers.RotatingFileHandler(
            log_path,
            maxBytes=max_bytes,
            backupCount=config.backup_count,
            encoding="utf-8",
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance

    Args:
        name: Logger name (usually __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)


def _parse_file_size(size_str: str) -> int:
    """
    Parse file size string into bytes

    Args:
        size_str: Size string like "10MB", "1GB", etc.

    Returns:
        Size in bytes
    """
    size_str = size_str.upper().strip()

    if size_str.endswith("KB"):
        return int(float(size_str[:-2]) * 1024)
    elif size_str.endswith("MB"):
        return int(float(size_str[:-2]) * 1024 * 1024)
    elif size_str.endswith("GB"):
        return int(float(size_str[:-2]) * 1024 * 1024 * 1024)
    elif size_str.endswith("B"):
        return int(float(size_str[:-1]))
    else:
        return int(float(size_str))


class PulseLogger:
    """
    Logger with helpers for optimizer restarts, solutions and checks
    """

    def __init__(self, name: str):
        self.logger = get_logger(name)

    def log_restart(self, restart_index: int, fidelity: float, total_area: float,
                    iterations: int) -> None:
        """
        Log the outcome of one optimizer restart

        Args:
            restart_index: Monte-Carlo restart number
            fidelity: Final fidelity of the restart
            total_area: Total pulse area in units of pi
            iterations: Quasi-Newton iterations used
        """
        self.logger.debug(
            f"RESTART {restart_index}: F={fidelity:.6f} A_tot={total_area:.4f}pi "
            f"iter={iterations}"
        )

    def log_solution(self, label: str, fidelity: float, total_area: float,
                     qualified: bool) -> None:
        """
        Log a selected solution

        Args:
            label: Target label
            fidelity: Solution fidelity
            total_area: Total pulse area in units of pi
            qualified: Whether the fidelity goal was reached
        """
        status = "OK" if qualified else "BELOW GOAL"
        self.logger.info(
            f"SOLUTION {label}: F={fidelity:.6f} A_tot={total_area:.3f}pi [{status}]"
        )

    def log_check(self, name: str, value: float, limit: float,
                  passed: Optional[bool] = None) -> None:
        """
        Log a numerical check against its limit

        Args:
            name: Check name
            value: Measured value
            limit: Acceptance limit
            passed: Verdict; computed as value < limit when omitted
        """
        if passed is None:
            passed = value < limit
        verdict = "pass" if passed else "FAIL"
        self.logger.info(f"CHECK {name}: {value:.3e} (limit {limit:.1e}) {verdict}")

    def log_error(self, context: str, error: Exception) -> None:
        """
        Log errors with context

        Args:
            context: Error context
            error: Exception that occurred
        """
        self.logger.error(f"ERROR {context}: {error}")

    def debug(self, message: str) -> None:
        """Debug logging"""
        self.logger.debug(message)

    def info(self, message: str) -> None:
        """Info logging"""
        self.logger.info(message)

    def warning(self, message: str) -> None:
        """Warning logging"""
        self.logger.warning(message)

    def error(self, message: str) -> None:
        """Error logging"""
        self.logger.error(message)

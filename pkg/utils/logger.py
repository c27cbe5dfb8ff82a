"""
Centralized logging utility for the cs3kit toolkit.
Provides structured logging with different levels and output formats.
"""

import sys
import json
from pathlib import Path
from typing import Optional
from datetime import datetime

from loguru import logger


class ToolkitLogger:
    """Centralized logger for every toolkit command"""

    def __init__(self,
                 log_level: str = "INFO",
                 log_file: Optional[str] = None,
                 session_id: Optional[str] = None):
        """
        Initialize the toolkit logger

        Args:
            log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
            log_file: Optional file path for logging
            session_id: Session ID for contextual logging
        """
        self.session_id = session_id or f"run_{datetime.now().strftime('%Y%m%d_%H%M%S')}"

        logger.remove()
        logger.configure(extra={"session_id": self.session_id, "module": "cs3kit"})

        # stdout carries command output, so the console sink goes to stderr
        logger.add(
            sys.stderr,
            level=log_level,
            format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
                   "<level>{level: <8}</level> | "
                   "<cyan>{extra[module]}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
                   "<blue>Run: {extra[session_id]}</blue> | "
                   "<level>{message}</level>",
            colorize=True
        )

        if log_file:
            log_path = Path(log_file)
            log_path.parent.mkdir(parents=True, exist_ok=True)

            logger.add(
                log_file,
                level=log_level,
                format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {extra[module]}:{function}:{line} | Run: {extra[session_id]} | {message}",
                rotation="100 MB",
                retention="30 days",
                compression="zip"
            )

        self.logger = logger.bind(session_id=self.session_id, module="cs3kit")

    def get_logger(self, module_name: str = None):
        """
        Get a logger instance for a specific module

        Args:
            module_name: Name of the module requesting the logger

        Returns:
            Configured logger instance
        """
        if module_name:
            return self.logger.bind(module=module_name)
        return self.logger

    def log_step_start(self, step: str, **params):
        """Log the start of a toolkit step"""
        params_info = f" | Params: {json.dumps(params, default=str)}" if params else ""
        self.logger.info(f"Starting {step}{params_info}")

    def log_step_complete(self, step: str, duration: float, **results):
        """Log the completion of a toolkit step"""
        results_info = f" | Results: {json.dumps(results, default=str)}" if results else ""
        self.logger.info(f"Completed {step} in {duration:.2f}s{results_info}")

    def log_error(self, step: str, error: Exception, context: dict = None):
        """Log an error with context"""
        context_info = f" | Context: {json.dumps(context, default=str)}" if context else ""
        self.logger.error(f"Error in {step}: {error}{context_info}")


_global_logger = None


def get_logger(module_name: str = None,
               log_level: str = "INFO",
               log_file: str = None,
               session_id: str = None):
    """
    Get a logger instance. Creates the global logger if it does not exist.

    Args:
        module_name: Name of the module requesting the logger
        log_level: Logging level
        log_file: Optional log file path
        session_id: Session ID for contextual logging

    Returns:
        Configured logger instance
    """
    global _global_logger

    if _global_logger is None:
        _global_logger = ToolkitLogger(
            log_level=log_level,
            log_file=log_file,
            session_id=session_id
        )

    return _global_logger.get_logger(module_name)


def configure_logging(log_level: str = "INFO",
                      log_file: Optional[str] = None,
                      session_id: Optional[str] = None) -> ToolkitLogger:
    """
    Reconfigure the global logger, e.g. once the CLI has parsed its flags.

    Loggers bound earlier through ``get_logger`` keep working: loguru sinks
    are global, only the handlers are replaced.
    """
    global _global_logger

    _global_logger = ToolkitLogger(
        log_level=log_level,
        log_file=log_file,
        session_id=session_id
    )
    return _global_logger


def setup_session_logging(session_id: str, log_dir: str = "logs", log_level: str = "INFO"):
    """
    Setup logging for a specific acceptance-run session

    Args:
        session_id: Unique session identifier
        log_dir: Directory to store log files
        log_level: Logging level
    """
    log_file = Path(log_dir) / f"{session_id}.log"
    return configure_logging(log_level=log_level, log_file=str(log_file),
                             session_id=session_id)

import logging
import os
from datetime import datetime, timezone
from typing import Optional

from vexleb.core.config import settings


def setup_logging(level: Optional[str] = None):
    """Setup logging configuration"""
    handlers = [logging.StreamHandler()]
    if settings.log_file:
        # Create the log directory if it doesn't exist
        directory = os.path.dirname(settings.log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        handlers.append(logging.FileHandler(settings.log_file))

    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def _emit(logger: logging.Logger, label: str, log_data: dict, level: str):
    if level.upper() == "INFO":
        logger.info(f"{label}: {log_data}")
    elif level.upper() == "WARNING":
        logger.warning(f"{label}: {log_data}")
    elif level.upper() == "ERROR":
        logger.error(f"{label}: {log_data}")
    else:
        logger.debug(f"{label}: {log_data}")


def log_run_event(command: str, details: dict = None, level: str = "INFO"):
    """Log CLI runs"""
    log_data = {
        "command": command,
        "details": details,
        "timestamp": _timestamp()
    }
    _emit(logging.getLogger("runs"), "Run", log_data, level)


def log_condition(report, level: str = "INFO"):
    """Log a condition evaluation"""
    log_data = {
        "name": report.name,
        "value": report.value,
        "arg": report.arg,
        "verdict": report.verdict,
        "timestamp": _timestamp()
    }
    _emit(logging.getLogger("conditions"), "Condition", log_data, level)


def log_experiment(name: str, details: dict = None, level: str = "INFO"):
    """Log experiment drivers"""
    log_data = {
        "experiment": name,
        "details": details,
        "timestamp": _timestamp()
    }
    _emit(logging.getLogger("experiments"), "Experiment", log_data, level)


def log_numeric_warning(event: str, details: dict = None):
    """Log numerical events worth a second look (bracket growth, skipped data, large ratios)"""
    log_data = {
        "event": event,
        "details": details,
        "timestamp": _timestamp()
    }
    _emit(logging.getLogger("numerics"), "Numerics", log_data, "WARNING")

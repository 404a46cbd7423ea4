from __future__ import annotations

import logging as _stdlib_logging
import sys
from typing import Any

import structlog


def _diagnostic_renderer(_logger: Any, _name: str, event_dict: dict) -> str:
    """Render `LEVEL code message key=value ...` for the cli diagnostics contract."""
    level = str(event_dict.pop("level", "info")).upper()
    code = event_dict.pop("code", "-")
    message = event_dict.pop("event", "")
    event_dict.pop("ts", None)
    extras = " ".join(f"{k}={event_dict[k]}" for k in sorted(event_dict))
    line = f"{level} {code} {message}"
    return f"{line} {extras}" if extras else line


def setup_logging(level: str = "INFO", fmt: str = "diagnostic") -> None:
    """Configure structlog and stdlib logging; everything goes to stderr.

    stdout is reserved for artifacts (JSON documents, CSV) written by the cli.
    """
    processors: list = [
        structlog.processors.TimeStamper(fmt="iso", key="ts"),
        structlog.processors.add_log_level,
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]
    if fmt == "json":
        processors.append(structlog.processors.JSONRenderer(sort_keys=True))
    else:
        processors.append(_diagnostic_renderer)

    structlog.configure(
        processors=processors,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )

    root = _stdlib_logging.getLogger()
    root.handlers.clear()
    handler = _stdlib_logging.StreamHandler(sys.stderr)
    handler.setFormatter(_stdlib_logging.Formatter("%(message)s"))
    root.addHandler(handler)
    root.setLevel(getattr(_stdlib_logging, level.upper(), _stdlib_logging.INFO))


def get_logger(name: str | None = None) -> Any:
    return structlog.get_logger(name)

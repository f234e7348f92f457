"""
Utility functions for the spider-web graph toolkit.
Logging setup, the exception hierarchy, environment settings and report formatting.
"""

import logging
import os
import sys
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional


SYMBOLS = "0123456789abcdefghijklmnopqrstuvwxyz"


class GraphAlgebraError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidGraphError(GraphAlgebraError, ValueError):
    """A graph violates its structural invariants."""


class InvalidParameterError(GraphAlgebraError, ValueError):
    """Family or run parameters are out of range."""


class NotIsomorphicError(GraphAlgebraError):
    """An isomorphism was requested where none exists."""


class NotAMorphismError(GraphAlgebraError):
    """A map does not commute with the endpoint maps."""


class UnbalancedGraphError(GraphAlgebraError):
    """In-degree and out-degree differ somewhere."""


class GroupMismatchError(GraphAlgebraError, ValueError):
    """Lamplighter elements over different lamp groups were combined."""


class DisconnectedGraphError(GraphAlgebraError):
    """
    Raised by whole-graph invariants on disconnected input.

    Attributes:
        per_component: the invariant evaluated on each connected component
    """

    def __init__(self, message: str, per_component: List[int]):
        super().__init__(message)
        self.per_component = per_component


def setup_logging(log_level: str = "INFO", log_file: Optional[str] = None):
    """
    Setup logging configuration for the toolkit.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_file: Optional log file path
    """
    numeric_level = getattr(logging, log_level.upper(), logging.INFO)

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    handlers: List[logging.Handler] = []
    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    # Console only shows warnings; reports go to stdout separately
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.WARNING)
    console_handler.setFormatter(formatter)
    handlers.append(console_handler)

    logging.basicConfig(level=numeric_level, handlers=handlers, force=True)

    logging.getLogger('sympy').setLevel(logging.WARNING)


@dataclass(frozen=True)
class Settings:
    """Environment-derived defaults for the CLI."""

    output_dir: Path
    log_level: str
    log_file: Optional[str]
    iso_cap: int
    node_cap: int


def load_settings() -> Settings:
    """
    Read toolkit settings from the environment.

    Returns:
        Settings with defaults filled in for unset variables
    """
    try:
        iso_cap = int(os.getenv("SPIDERWEB_ISO_CAP", "512"))
        node_cap = int(os.getenv("SPIDERWEB_NODE_CAP", "200000"))
    except ValueError as e:
        raise InvalidParameterError(f"search caps must be integers: {e}") from e

    return Settings(
        output_dir=Path(os.getenv("SPIDERWEB_OUTPUT_DIR", "output")),
        log_level=os.getenv("SPIDERWEB_LOG_LEVEL", "INFO"),
        log_file=os.getenv("SPIDERWEB_LOG_FILE") or None,
        iso_cap=iso_cap,
        node_cap=node_cap,
    )


def word_to_name(word) -> str:
    """Render a tuple of symbols in {0..k-1} as a string."""
    return "".join(SYMBOLS[x] for x in word)


def name_to_word(name: str) -> tuple:
    """Parse a symbol string back into a tuple of integers."""
    try:
        return tuple(SYMBOLS.index(ch) for ch in name)
    except ValueError as e:
        raise InvalidParameterError(f"invalid symbol string {name!r}") from e


def check_alphabet(k: int):
    """Reject alphabet sizes the naming scheme cannot represent."""
    if not isinstance(k, int) or k < 2:
        raise InvalidParameterError(f"k must be an integer >= 2, got {k!r}")
    if k > len(SYMBOLS):
        raise InvalidParameterError(f"k must be at most {len(SYMBOLS)}, got {k}")


def get_timestamp() -> str:
    """
    Get current timestamp as string.

    Returns:
        Current timestamp in ISO format
    """
    return datetime.now().isoformat()


def format_report_table(rows: List[Dict[str, Any]]) -> str:
    """
    Format verification results for terminal display.

    Args:
        rows: report dictionaries with suite, check, status and runtime_ms

    Returns:
        Multi-line summary, one check per line
    """
    marks = {"pass": "✅", "fail": "❌", "undecided": "❔", "error": "💥"}
    lines = []
    for row in rows:
        mark = marks.get(row.get("status", ""), "•")
        params = ", ".join(f"{key}={value}" for key, value in row.get("params", {}).items())
        lines.append(
            f"{mark} {row.get('suite')}/{row.get('check')} ({params}) "
            f"{row.get('runtime_ms', 0):.1f} ms"
        )
    passed = sum(1 for row in rows if row.get("status") == "pass")
    lines.append(f"📊 {passed}/{len(rows)} checks passed")
    return "\n".join(lines)


def handle_error(error: Exception, context: str = "") -> tuple:
    """
    Handle and format errors for user display.

    Args:
        error: The exception that occurred
        context: Additional context about where the error occurred

    Returns:
        (user-friendly message, process exit code)
    """
    error_msg = str(error)

    logging.error(f"Error in {context}: {error_msg}")

    if isinstance(error, (InvalidParameterError, InvalidGraphError)):
        return f"❌ Invalid input: {error_msg}", 2
    elif isinstance(error, FileNotFoundError):
        return f"📁 File not found: {error_msg}", 2
    elif isinstance(error, GraphAlgebraError):
        return f"❌ {error.__class__.__name__}: {error_msg}", 1
    else:
        return f"❌ An error occurred: {error_msg}", 1

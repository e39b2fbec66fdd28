"""Application logging setup.

Configures a hierarchical logger under the ``archetype_lab`` namespace.
Log level, file output, and console output are controlled via environment
variables (LOG_LEVEL, LOG_FILE, LOG_CONSOLE). Records carry the thread name,
so lines from concurrent trials (``trial_*`` workers) and bidders
(``bidder_*`` workers) can be told apart.
"""

import logging
import sys
import threading

_LOGGER_NS = "archetype_lab"
_FORMAT = "%(asctime)s | %(levelname)-8s | %(threadName)s | %(name)s | %(message)s"

_configured = False
_lock = threading.RLock()


def _setup_root_logger() -> None:
    """Attach handlers to the ``archetype_lab`` logger once, from env settings."""
    global _configured
    with _lock:
        if _configured:
            return
        _configured = True
        _attach_handlers()


def _attach_handlers() -> None:
    from config import DEFAULT_LOG_FILE, DEFAULT_LOG_LEVEL, get_env, get_project_root

    level_name: str = get_env("LOG_LEVEL", DEFAULT_LOG_LEVEL, str)
    log_file: str = get_env("LOG_FILE", DEFAULT_LOG_FILE, str)
    console: bool = get_env("LOG_CONSOLE", False, bool)

    level = getattr(logging, level_name.upper(), logging.INFO)
    root = logging.getLogger(_LOGGER_NS)
    root.setLevel(level)
    fmt = logging.Formatter(_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")

    handlers: list[logging.Handler] = []
    if log_file:
        handlers.append(logging.FileHandler(get_project_root() / log_file, encoding="utf-8"))
    if console:
        handlers.append(logging.StreamHandler(sys.stderr))
    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(fmt)
        root.addHandler(handler)


def get_logger(name: str) -> logging.Logger:
    """Return a child logger under the ``archetype_lab`` namespace.

    Args:
        name: Module name (typically ``__name__``).
    """
    _setup_root_logger()
    qualified = name if name.startswith(f"{_LOGGER_NS}.") else f"{_LOGGER_NS}.{name}"
    return logging.getLogger(qualified)

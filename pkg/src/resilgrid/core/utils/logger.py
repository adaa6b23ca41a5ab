"""Shared logging setup."""
import logging
import sys

_ROOT = "resilgrid"


def get_logger(name: str, level: int = logging.NOTSET) -> logging.Logger:
    """Return a logger prefixed with ``resilgrid.``."""
    logger = logging.getLogger(f"{_ROOT}.{name}")
    if level != logging.NOTSET:
        logger.setLevel(level)
    _ensure_root_handler()
    return logger


def configure_logging(level: int = logging.INFO) -> None:
    """Set the level for every ``resilgrid.*`` logger."""
    _ensure_root_handler().setLevel(level)


def _ensure_root_handler() -> logging.Logger:
    root = logging.getLogger(_ROOT)
    if not root.handlers:
        # stderr keeps stdout clean for tables and dumped presets
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(
            logging.Formatter(
                "%(asctime)s [%(levelname)s] %(name)s: %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )
        )
        root.addHandler(handler)
        root.setLevel(logging.INFO)
        root.propagate = False
    return root

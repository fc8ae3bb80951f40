"""Exact arithmetic and classification for truncated local shtukas, displays and F-zips."""

__version__ = "0.1.0"

from .errors import ForgeError  # noqa: E402

__all__ = ["__version__", "ForgeError"]

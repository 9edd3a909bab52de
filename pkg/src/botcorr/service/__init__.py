"""HTTP service wrapping the detection package."""

from .app import app

__all__ = ["app"]

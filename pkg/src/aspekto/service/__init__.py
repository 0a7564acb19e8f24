"""HTTP service backing the annotation workbench and pipeline endpoints."""

from .app import create_app
from .store import CalibrationStore, DuplicateAnnotationError, UnknownResourceError

__all__ = [
    "CalibrationStore",
    "DuplicateAnnotationError",
    "UnknownResourceError",
    "create_app",
]

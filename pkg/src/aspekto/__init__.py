"""Aspect identification and extraction for code-switched Taglish reviews."""

__version__ = "0.1.0"

from .labels import LabelVector, enforce_hierarchy
from .reviews import AspectSpan, Review
from .taxonomy import ALL_SLUGS, GENERALS, SPECIFIC_SLUGS, parent_of, taxonomy_document

__all__ = [
    "ALL_SLUGS",
    "AspectSpan",
    "GENERALS",
    "LabelVector",
    "Review",
    "SPECIFIC_SLUGS",
    "enforce_hierarchy",
    "parent_of",
    "taxonomy_document",
    "__version__",
]

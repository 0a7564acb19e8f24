"""Reviews and extracted aspect spans."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import taxonomy
from .errors import ValidationError


@dataclass(frozen=True)
class Review:
    id: str
    text: str
    source: Optional[str] = None

    def __post_init__(self):
        if not self.id:
            raise ValidationError("review id must be non-empty")
        if not self.text.strip():
            raise ValidationError(f"review {self.id!r}: text is empty")


@dataclass(frozen=True)
class AspectSpan:
    """A character span in a review expressing one general category.

    Offsets are half-open ``[start, end)`` into the original review text;
    ``surface`` is the exact substring at those offsets.
    """

    category: str
    start: int
    end: int
    surface: str

    def __post_init__(self):
        if not taxonomy.is_general(self.category):
            raise ValidationError(f"unknown general category: {self.category!r}")
        if not (0 <= self.start < self.end):
            raise ValidationError(
                f"invalid span offsets: start={self.start}, end={self.end}"
            )
        if len(self.surface) != self.end - self.start:
            raise ValidationError(
                f"surface length {len(self.surface)} does not match span "
                f"[{self.start}, {self.end})"
            )

    @classmethod
    def from_text(cls, text: str, start: int, end: int, category: str) -> "AspectSpan":
        if end > len(text):
            raise ValidationError(f"span end {end} beyond text length {len(text)}")
        return cls(category=category, start=start, end=end, surface=text[start:end])

    def matches_text(self, text: str) -> bool:
        return self.end <= len(text) and text[self.start : self.end] == self.surface

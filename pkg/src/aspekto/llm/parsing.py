"""Parsing of model output into label vectors and aligned spans.

The parsers are total: any string yields either a parsed payload or a
:class:`ParseFailure` with a reason -- never an exception -- because a
retry policy sits on top of them.  Models wrap JSON in prose and code
fences, so extraction scans for the first balanced JSON object.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Optional, Union

from .. import taxonomy
from ..labels import LabelVector
from ..reviews import AspectSpan, Review
from ..rules import normalize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParsedLabels:
    vector: LabelVector
    # specifics the hierarchy repair turned off (model said specific, not general)
    repaired: tuple[str, ...] = ()


@dataclass(frozen=True)
class ParseFailure:
    reason: str


def extract_json_object(raw: str) -> Optional[str]:
    """First balanced ``{...}`` in the string, fence- and prose-tolerant."""
    depth = 0
    start = None
    in_string = False
    escaped = False
    for i, ch in enumerate(raw):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"' and depth > 0:
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0:
                return raw[start : i + 1]
    return None


def parse_boolean_output(raw: str) -> Union[ParsedLabels, ParseFailure]:
    """Parse a slug-keyed boolean object into a consistent label vector.

    Missing keys default to false; unknown keys fail; non-boolean values
    fail.  A vector that marks a specific without its general is repaired
    by hierarchy masking, with the repaired slugs reported.
    """
    payload = extract_json_object(raw)
    if payload is None:
        return ParseFailure("no JSON object found in output")
    try:
        data = json.loads(payload)
    except json.JSONDecodeError as exc:
        return ParseFailure(f"invalid JSON: {exc.msg}")
    if not isinstance(data, dict):
        return ParseFailure("output is not a JSON object")
    slugs = []
    for key, value in data.items():
        if not taxonomy.is_label(key):
            return ParseFailure(f"unknown label key: {key!r}")
        if not isinstance(value, bool):
            return ParseFailure(f"non-boolean value for {key!r}: {value!r}")
        if value:
            slugs.append(key)
    raw_vector = LabelVector.from_slugs(slugs, strict=False)
    repaired = raw_vector.inconsistent_specifics()
    return ParsedLabels(vector=raw_vector.enforce_hierarchy(), repaired=repaired)


def parse_span_output(raw: str) -> Union[list[tuple[str, str]], ParseFailure]:
    """Parse ``{"spans": [{"category", "text"}]}`` into (category, text) pairs."""
    payload = extract_json_object(raw)
    if payload is None:
        return ParseFailure("no JSON object found in output")
    try:
        data = json.loads(payload)
    except json.JSONDecodeError as exc:
        return ParseFailure(f"invalid JSON: {exc.msg}")
    if not isinstance(data, dict) or not isinstance(data.get("spans"), list):
        return ParseFailure('output must be an object with a "spans" array')
    pairs: list[tuple[str, str]] = []
    for i, item in enumerate(data["spans"]):
        if not isinstance(item, dict):
            return ParseFailure(f"spans[{i}] is not an object")
        category = item.get("category")
        text = item.get("text")
        if category not in taxonomy.GENERALS:
            return ParseFailure(f"spans[{i}]: unknown category {category!r}")
        if not isinstance(text, str) or not text.strip():
            return ParseFailure(f"spans[{i}]: missing span text")
        pairs.append((category, text))
    return pairs


def align_spans(
    review: Review, pairs: list[tuple[str, str]]
) -> tuple[list[AspectSpan], list[tuple[str, str]]]:
    """Locate model-returned strings in the review as character spans.

    Exact substring match first, then a normalized match (case folding,
    repeated-letter collapse); repeated identical snippets consume
    successive occurrences left to right.  Unlocatable strings are dropped
    and logged -- they surface later in span scoring as misses.
    """
    norm = normalize(review.text)
    cursor_exact: dict[str, int] = {}
    cursor_norm: dict[str, int] = {}
    spans: list[AspectSpan] = []
    dropped: list[tuple[str, str]] = []
    for category, snippet in pairs:
        start = review.text.find(snippet, cursor_exact.get(snippet, 0))
        if start >= 0:
            cursor_exact[snippet] = start + 1
            spans.append(
                AspectSpan.from_text(review.text, start, start + len(snippet), category)
            )
            continue
        normalized_snippet = normalize(snippet).text
        pos = norm.text.find(normalized_snippet, cursor_norm.get(snippet, 0))
        if normalized_snippet and pos >= 0:
            cursor_norm[snippet] = pos + 1
            orig_start, orig_end = norm.original_span(pos, pos + len(normalized_snippet))
            spans.append(AspectSpan.from_text(review.text, orig_start, orig_end, category))
            continue
        log.info("review %s: dropping unlocatable span %r (%s)", review.id, snippet, category)
        dropped.append((category, snippet))
    return spans, dropped

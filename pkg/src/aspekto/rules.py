"""Deterministic rule-based aspect tagger.

Two matching levels over normalized text:

1. lexicon entries -- word-boundary literals or regexes mapping straight to
   specific aspects ("mura" -> PRICE.Affordability);
2. disambiguation rules -- an ambiguous trigger term resolved by scanning a
   token window around it for context cues ("bilis" near "dumating" ->
   DELIVERY.Timeliness, near "epekto" -> PRODUCT.Effectiveness).

Rules live in a JSON config file, never in code; the loader validates
every pattern and label against the taxonomy and reports line-precise
errors.  Tagging is pure: identical (text, config) always produces
identical output, and all match spans refer to the *original* text.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Sequence

from . import taxonomy
from .errors import ConfigError
from .labels import LabelVector
from .reviews import AspectSpan, Review

# Tokens are maximal runs of letters/digits; underscore excluded on purpose.
TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

DEFAULT_RULES_RESOURCE = "rules_default.json"


# ---------------------------------------------------------------------------
# Normalization


@dataclass(frozen=True)
class NormalizedText:
    """Normalized text plus a per-character map back to original offsets."""

    text: str
    # char_spans[i] = (orig_start, orig_end) for normalized character i
    char_spans: tuple[tuple[int, int], ...]

    def original_span(self, start: int, end: int) -> tuple[int, int]:
        if not 0 <= start < end <= len(self.text):
            raise IndexError(f"normalized span out of range: [{start}, {end})")
        return self.char_spans[start][0], self.char_spans[end - 1][1]


def normalize(text: str) -> NormalizedText:
    """Lowercase, NFKC-normalize, and collapse letter runs of >= 3 to one.

    "MURA!" -> "mura!";  "muraaaa" -> "mura" (the surviving "a" maps back
    to the whole "aaaa" range, so matches still recover original spans).
    """
    chars: list[str] = []
    spans: list[tuple[int, int]] = []
    for i, ch in enumerate(text):
        for out in unicodedata.normalize("NFKC", ch).lower():
            chars.append(out)
            spans.append((i, i + 1))

    out_chars: list[str] = []
    out_spans: list[tuple[int, int]] = []
    i = 0
    while i < len(chars):
        j = i
        while j < len(chars) and chars[j] == chars[i]:
            j += 1
        run = j - i
        if run >= 3 and chars[i].isalpha():
            out_chars.append(chars[i])
            out_spans.append((spans[i][0], spans[j - 1][1]))
        else:
            out_chars.extend(chars[i:j])
            out_spans.extend(spans[i:j])
        i = j
    return NormalizedText("".join(out_chars), tuple(out_spans))


# ---------------------------------------------------------------------------
# Config types


@dataclass(frozen=True)
class LexiconEntry:
    id: str
    pattern: str
    match_mode: str  # "word" | "regex"
    targets: tuple[str, ...]
    regex: re.Pattern = field(compare=False, repr=False, default=None)


@dataclass(frozen=True)
class Branch:
    cues: tuple[str, ...]
    target: str
    cue_regexes: tuple[re.Pattern, ...] = field(compare=False, repr=False, default=())


@dataclass(frozen=True)
class DisambiguationRule:
    id: str
    trigger: str
    branches: tuple[Branch, ...]
    default_target: Optional[str]  # None means "no match when no cue fires"
    window: int
    trigger_regex: re.Pattern = field(compare=False, repr=False, default=None)


@dataclass(frozen=True)
class RuleConfig:
    lexicon: tuple[LexiconEntry, ...]
    disambiguation: tuple[DisambiguationRule, ...]
    version: int = 1


@dataclass(frozen=True)
class RuleMatch:
    span: AspectSpan
    specific: str
    rule_id: str


def _word_regex(pattern: str) -> re.Pattern:
    return re.compile(r"\b" + re.escape(pattern) + r"\b", re.UNICODE)


def _cue_regex(pattern: str) -> re.Pattern:
    return re.compile(r"\b(?:" + pattern + r")\b", re.UNICODE)


# ---------------------------------------------------------------------------
# Config loading


def _line_of(raw: str, key: str, occurrence: int) -> int:
    """1-based line of the n-th occurrence of a JSON key, for error reports."""
    needle = f'"{key}"'
    pos = -1
    for _ in range(occurrence + 1):
        pos = raw.find(needle, pos + 1)
        if pos < 0:
            return 0
    return raw.count("\n", 0, pos) + 1


def parse_rule_config(raw: str, source: str = "<config>") -> RuleConfig:
    """Parse and validate a JSON rule config; collects all errors at once."""
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")

    errors: list[str] = []

    def err(line: int, message: str) -> None:
        errors.append(f"{source}:{line}: {message}")

    lexicon: list[LexiconEntry] = []
    raw_entries = list(data.get("lexicon", [])) + list(data.get("lexicon_expansion", []))
    for i, entry in enumerate(raw_entries):
        line = _line_of(raw, "pattern", i)
        if not isinstance(entry, dict):
            err(line, f"lexicon[{i}]: entry must be an object")
            continue
        pattern = entry.get("pattern")
        mode = entry.get("match_mode", "word")
        targets = entry.get("targets", [])
        entry_id = entry.get("id") or f"lex-{i}"
        if not pattern or not isinstance(pattern, str):
            err(line, f"lexicon[{i}]: missing or non-string pattern")
            continue
        if mode not in ("word", "regex"):
            err(line, f"lexicon[{i}] ({pattern!r}): bad match_mode {mode!r}")
            continue
        if not targets:
            err(line, f"lexicon[{i}] ({pattern!r}): targets must be non-empty")
            continue
        bad = [t for t in targets if not taxonomy.is_specific(t)]
        if bad:
            err(line, f"lexicon[{i}] ({pattern!r}): unknown target label(s): {bad}")
            continue
        try:
            regex = _word_regex(pattern) if mode == "word" else re.compile(pattern, re.UNICODE)
        except re.error as exc:
            err(line, f"lexicon[{i}] ({pattern!r}): pattern does not compile: {exc}")
            continue
        lexicon.append(LexiconEntry(entry_id, pattern, mode, tuple(targets), regex))

    rules: list[DisambiguationRule] = []
    for i, rule in enumerate(data.get("disambiguation", [])):
        line = _line_of(raw, "trigger", i)
        if not isinstance(rule, dict):
            err(line, f"disambiguation[{i}]: rule must be an object")
            continue
        rule_id = rule.get("id") or f"disamb-{i}"
        trigger = rule.get("trigger")
        window = rule.get("window", 5)
        default = rule.get("default_target", "none")
        raw_branches = rule.get("branches", [])
        if not trigger or not isinstance(trigger, str):
            err(line, f"disambiguation[{i}] ({rule_id}): missing trigger")
            continue
        if not isinstance(window, int) or window < 1:
            err(line, f"disambiguation[{i}] ({rule_id}): window must be a positive integer")
            continue
        try:
            trigger_regex = _cue_regex(trigger)
        except re.error as exc:
            err(line, f"disambiguation[{i}] ({rule_id}): trigger does not compile: {exc}")
            continue
        branches: list[Branch] = []
        branch_ok = True
        for j, branch in enumerate(raw_branches):
            cues = branch.get("cues", []) if isinstance(branch, dict) else []
            target = branch.get("target") if isinstance(branch, dict) else None
            if not cues or not target:
                err(line, f"disambiguation[{i}] ({rule_id}): branch {j} needs cues and target")
                branch_ok = False
                continue
            if not taxonomy.is_specific(target):
                err(line, f"disambiguation[{i}] ({rule_id}): unknown branch target {target!r}")
                branch_ok = False
                continue
            try:
                cue_regexes = tuple(_cue_regex(c) for c in cues)
            except re.error as exc:
                err(line, f"disambiguation[{i}] ({rule_id}): cue does not compile: {exc}")
                branch_ok = False
                continue
            branches.append(Branch(tuple(cues), target, cue_regexes))
        if not branch_ok:
            continue
        default_target: Optional[str]
        if default in (None, "none"):
            default_target = None
        elif taxonomy.is_specific(default):
            default_target = default
        else:
            err(line, f"disambiguation[{i}] ({rule_id}): unknown default_target {default!r}")
            continue
        distinct = {b.target for b in branches} | ({default_target} - {None})
        if len(distinct) < 2:
            err(
                line,
                f"disambiguation[{i}] ({rule_id}): needs >= 2 distinct targets "
                "across branches and default (otherwise it is a lexicon entry)",
            )
            continue
        rules.append(
            DisambiguationRule(rule_id, trigger, tuple(branches), default_target, window, trigger_regex)
        )

    ids = [r.id for r in rules]
    for dup in {x for x in ids if ids.count(x) > 1}:
        errors.append(f"{source}: duplicate disambiguation rule id {dup!r}")

    if errors:
        raise ConfigError(errors)
    return RuleConfig(tuple(lexicon), tuple(rules), version=data.get("version", 1))


def load_rules(path: str) -> RuleConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_rule_config(fh.read(), source=path)


def default_rules() -> RuleConfig:
    """The shipped lexicon and disambiguation rules."""
    raw = (
        resources.files("aspekto").joinpath("data", DEFAULT_RULES_RESOURCE).read_text("utf-8")
    )
    return parse_rule_config(raw, source=DEFAULT_RULES_RESOURCE)


# ---------------------------------------------------------------------------
# Matching


def _make_match(
    review: Review, norm: NormalizedText, start: int, end: int, specific: str, rule_id: str
) -> RuleMatch:
    orig_start, orig_end = norm.original_span(start, end)
    span = AspectSpan.from_text(
        review.text, orig_start, orig_end, taxonomy.parent_slug(specific)
    )
    return RuleMatch(span=span, specific=specific, rule_id=rule_id)


def match_lexicon(
    review: Review,
    lexicon: Sequence[LexiconEntry],
    norm: NormalizedText | None = None,
) -> list[RuleMatch]:
    """Every occurrence of every entry, one match per target, sorted by
    (start, lexicon order)."""
    norm = norm or normalize(review.text)
    found: list[tuple[int, int, int, RuleMatch]] = []
    for entry_index, entry in enumerate(lexicon):
        for m in entry.regex.finditer(norm.text):
            if m.end() == m.start():
                continue
            for target_index, target in enumerate(entry.targets):
                match = _make_match(review, norm, m.start(), m.end(), target, entry.id)
                found.append((match.span.start, entry_index, target_index, match))
    found.sort(key=lambda item: item[:3])
    return [item[3] for item in found]


def _token_spans(text: str) -> list[tuple[int, int]]:
    return [(m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


def apply_disambiguation(
    review: Review,
    rules: Sequence[DisambiguationRule],
    norm: NormalizedText | None = None,
) -> tuple[list[RuleMatch], list[tuple[int, int]]]:
    """Resolve each trigger occurrence against its context window.

    Returns the matches plus every trigger occurrence span in *original*
    offsets (a trigger that resolved to nothing still claims its span, so
    the tagger can suppress naive lexicon hits on it).
    """
    norm = norm or normalize(review.text)
    tokens = _token_spans(norm.text)
    matches: list[RuleMatch] = []
    trigger_spans: list[tuple[int, int]] = []
    for rule in rules:
        for m in rule.trigger_regex.finditer(norm.text):
            t_start, t_end = m.start(), m.end()
            if t_end == t_start:
                continue
            overlapping = [
                i for i, (s, e) in enumerate(tokens) if s < t_end and e > t_start
            ]
            if not overlapping:
                continue
            trigger_spans.append(norm.original_span(t_start, t_end))
            first, last = overlapping[0], overlapping[-1]
            win_start = tokens[max(0, first - rule.window)][0]
            win_end = tokens[min(len(tokens) - 1, last + rule.window)][1]
            target = rule.default_target
            for branch in rule.branches:
                hit = False
                for cue in branch.cue_regexes:
                    for cm in cue.finditer(norm.text, win_start, win_end):
                        # the trigger itself never counts as its own cue
                        if cm.start() >= t_end or cm.end() <= t_start:
                            hit = True
                            break
                    if hit:
                        break
                if hit:
                    target = branch.target
                    break
            if target is not None:
                matches.append(_make_match(review, norm, t_start, t_end, target, rule.id))
    return matches, trigger_spans


def tag_review(review: Review, config: RuleConfig) -> tuple[LabelVector, list[RuleMatch]]:
    """Tag one review: lexicon plus disambiguation, disambiguation winning
    on overlapping trigger spans.  The vector sets each matched specific and
    its parent general, so it is hierarchy-consistent by construction."""
    norm = normalize(review.text)
    lexicon_matches = match_lexicon(review, config.lexicon, norm)
    disamb_matches, trigger_spans = apply_disambiguation(review, config.disambiguation, norm)

    def overlaps_trigger(match: RuleMatch) -> bool:
        return any(
            match.span.start < te and match.span.end > ts for ts, te in trigger_spans
        )

    kept = [m for m in lexicon_matches if not overlaps_trigger(m)]
    combined = sorted(kept + disamb_matches, key=lambda m: m.span.start)

    slugs = set()
    for match in combined:
        slugs.add(match.specific)
        slugs.add(taxonomy.parent_slug(match.specific))
    return LabelVector.from_slugs(slugs), combined


def tag_text(text: str, config: RuleConfig, review_id: str = "adhoc") -> tuple[LabelVector, list[RuleMatch]]:
    return tag_review(Review(id=review_id, text=text), config)

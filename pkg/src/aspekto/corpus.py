"""Corpus ingestion, persistence, splitting and label statistics.

Canonical format is JSONL: an optional header line carrying the schema
version and provenance, then one review per line::

    {"kind": "aspect-corpus", "schema_version": 1, "provenance": {...}}
    {"id": "r001", "text": "...", "source": "...",
     "labels": {"PRICE": true, "PRICE.Affordability": true},
     "spans": [{"category": "PRICE", "start": 0, "end": 4}]}

``labels`` is sparse (absent slugs are false) and must be hierarchy
consistent.  CSV is supported for raw-review ingestion only (columns:
id, text[, source]); spans and 25 labels do not fit CSV cleanly.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from typing import Optional

from . import taxonomy
from .errors import CorpusError, ValidationError
from .labels import LabelVector
from .reviews import AspectSpan, Review

SCHEMA_KIND = "aspect-corpus"
SCHEMA_VERSION = 1
PREDICTIONS_KIND = "aspect-predictions"


def synthetic_corpus_path() -> str:
    """Path of the shipped 60-review Taglish-style fixture corpus."""
    from importlib import resources

    return str(resources.files("aspekto").joinpath("data", "synthetic_corpus.jsonl"))


@dataclass(frozen=True)
class CorpusItem:
    review: Review
    gold: Optional[LabelVector] = None
    gold_spans: Optional[tuple[AspectSpan, ...]] = None


@dataclass(frozen=True)
class Corpus:
    items: tuple[CorpusItem, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for item in self.items:
            if item.review.id in seen:
                raise ValidationError(f"duplicate review id: {item.review.id!r}")
            seen.add(item.review.id)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def reviews(self) -> list[Review]:
        return [item.review for item in self.items]

    def ids(self) -> list[str]:
        return [item.review.id for item in self.items]

    def get(self, review_id: str) -> CorpusItem:
        for item in self.items:
            if item.review.id == review_id:
                return item
        raise KeyError(review_id)

    def gold_vectors(self) -> dict[str, LabelVector]:
        return {
            item.review.id: item.gold for item in self.items if item.gold is not None
        }


@dataclass(frozen=True)
class LineError:
    line: int
    message: str

    def to_dict(self) -> dict:
        return {"line": self.line, "message": self.message}


def _parse_item(row: dict) -> CorpusItem:
    review = Review(
        id=str(row.get("id", "")), text=row.get("text", ""), source=row.get("source")
    )
    gold = None
    if "labels" in row and row["labels"] is not None:
        if not isinstance(row["labels"], dict):
            raise ValidationError("labels must be an object keyed by slug")
        gold = LabelVector.from_map(row["labels"], strict=True)
    spans = None
    if "spans" in row and row["spans"] is not None:
        parsed = []
        for s in row["spans"]:
            span = AspectSpan.from_text(
                review.text, int(s["start"]), int(s["end"]), s["category"]
            )
            if "surface" in s and s["surface"] != span.surface:
                raise ValidationError(
                    f"span surface {s['surface']!r} does not match text slice {span.surface!r}"
                )
            parsed.append(span)
        spans = tuple(parsed)
    return CorpusItem(review=review, gold=gold, gold_spans=spans)


def _load_jsonl(path: str) -> tuple[list[CorpusItem], dict, list[LineError]]:
    items: list[CorpusItem] = []
    provenance: dict = {}
    errors: list[LineError] = []
    seen_ids: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                errors.append(LineError(lineno, f"invalid JSON: {exc.msg}"))
                continue
            if not isinstance(row, dict):
                errors.append(LineError(lineno, "row must be a JSON object"))
                continue
            if "schema_version" in row and "id" not in row:
                if row.get("kind") not in (None, SCHEMA_KIND):
                    errors.append(LineError(lineno, f"unexpected kind {row.get('kind')!r}"))
                elif row.get("schema_version") != SCHEMA_VERSION:
                    errors.append(
                        LineError(lineno, f"unsupported schema_version {row.get('schema_version')!r}")
                    )
                else:
                    provenance = row.get("provenance", {})
                continue
            try:
                item = _parse_item(row)
            except (ValidationError, KeyError, TypeError) as exc:
                errors.append(LineError(lineno, str(exc) or repr(exc)))
                continue
            if item.review.id in seen_ids:
                errors.append(LineError(lineno, f"duplicate review id: {item.review.id!r}"))
                continue
            seen_ids.add(item.review.id)
            items.append(item)
    return items, provenance, errors


def _load_csv(path: str) -> tuple[list[CorpusItem], dict, list[LineError]]:
    items: list[CorpusItem] = []
    errors: list[LineError] = []
    seen_ids: set[str] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "id" not in reader.fieldnames or "text" not in reader.fieldnames:
            raise ValidationError(f"{path}: CSV must have 'id' and 'text' columns")
        for lineno, row in enumerate(reader, start=2):
            try:
                review = Review(
                    id=row.get("id") or "", text=row.get("text") or "",
                    source=row.get("source") or None,
                )
            except ValidationError as exc:
                errors.append(LineError(lineno, str(exc)))
                continue
            if review.id in seen_ids:
                errors.append(LineError(lineno, f"duplicate review id: {review.id!r}"))
                continue
            seen_ids.add(review.id)
            items.append(CorpusItem(review=review))
    return items, {}, errors


def load_corpus(
    path: str, fmt: str = "jsonl", mode: str = "strict"
) -> tuple[Corpus, list[LineError]]:
    """Load a corpus; strict mode raises on any bad row, lenient mode
    quarantines bad rows and returns them as line errors."""
    if mode not in ("strict", "lenient"):
        raise ValidationError(f"unknown mode: {mode!r}")
    if fmt == "jsonl":
        items, provenance, errors = _load_jsonl(path)
    elif fmt == "csv":
        items, provenance, errors = _load_csv(path)
    else:
        raise ValidationError(f"unknown corpus format: {fmt!r}")
    if errors and mode == "strict":
        raise CorpusError(errors)
    return Corpus(items=tuple(items), provenance=provenance), errors


def save_corpus(corpus: Corpus, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "kind": SCHEMA_KIND,
            "schema_version": SCHEMA_VERSION,
            "provenance": corpus.provenance,
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for item in corpus.items:
            row: dict = {"id": item.review.id, "text": item.review.text}
            if item.review.source is not None:
                row["source"] = item.review.source
            if item.gold is not None:
                row["labels"] = {slug: True for slug in item.gold.true_slugs()}
            if item.gold_spans is not None:
                row["spans"] = [
                    {
                        "category": s.category,
                        "start": s.start,
                        "end": s.end,
                        "surface": s.surface,
                    }
                    for s in item.gold_spans
                ]
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Prediction files: {"id": ..., "labels": {...}} or {"id": ..., "unannotated": true}


def save_predictions(predictions: dict[str, Optional[LabelVector]], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            json.dumps({"kind": PREDICTIONS_KIND, "schema_version": SCHEMA_VERSION}) + "\n"
        )
        for review_id, vector in predictions.items():
            if vector is None:
                row = {"id": review_id, "unannotated": True}
            else:
                row = {"id": review_id, "labels": {s: True for s in vector.true_slugs()}}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def load_predictions(path: str) -> dict[str, Optional[LabelVector]]:
    out: dict[str, Optional[LabelVector]] = {}
    errors: list[LineError] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                errors.append(LineError(lineno, f"invalid JSON: {exc.msg}"))
                continue
            if "schema_version" in row and "id" not in row:
                continue
            review_id = row.get("id")
            if not review_id:
                errors.append(LineError(lineno, "missing id"))
                continue
            if row.get("unannotated"):
                out[review_id] = None
                continue
            try:
                out[review_id] = LabelVector.from_map(row.get("labels", {}), strict=True)
            except ValidationError as exc:
                errors.append(LineError(lineno, str(exc)))
    if errors:
        raise CorpusError(errors)
    return out


# ---------------------------------------------------------------------------
# Splitting


@dataclass(frozen=True)
class SplitSpec:
    seed: int
    train_fraction: float = 0.8
    test_fraction: float = 0.2
    stratify_by: Optional[str] = None

    def __post_init__(self):
        if not (0 < self.train_fraction < 1 and 0 < self.test_fraction < 1):
            raise ValidationError("split fractions must lie in (0, 1)")
        if abs(self.train_fraction + self.test_fraction - 1.0) > 1e-9:
            raise ValidationError("train and test fractions must sum to 1")
        if self.stratify_by is not None and not taxonomy.is_general(self.stratify_by):
            raise ValidationError(
                f"stratify_by must be a general label, got {self.stratify_by!r}"
            )


def split(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """Deterministic, exact train/test partition.

    With ``stratify_by`` set, test items are allocated per stratum
    (positive/negative on that general) by largest remainder, keeping the
    label's prevalence within one item of the corpus rate.
    """
    n = len(corpus)
    if n < 2:
        raise ValidationError("corpus must have at least 2 items to split")
    rng = random.Random(spec.seed)
    n_train = min(max(round(n * spec.train_fraction), 1), n - 1)
    n_test = n - n_train

    if spec.stratify_by is None:
        indices = list(range(n))
        rng.shuffle(indices)
        test_set = set(indices[:n_test])
    else:
        if any(item.gold is None for item in corpus.items):
            raise ValidationError("stratified split requires gold labels on every item")
        positives = [i for i, item in enumerate(corpus.items) if item.gold.get(spec.stratify_by)]
        negatives = [i for i in range(n) if i not in set(positives)]
        quotas = []
        for stratum in (positives, negatives):
            exact = len(stratum) * n_test / n
            quotas.append([int(exact), exact - int(exact)])
        short = n_test - sum(q[0] for q in quotas)
        # hand the leftover test slots to the largest fractional remainders
        for idx in sorted(range(len(quotas)), key=lambda i: -quotas[i][1])[:short]:
            quotas[idx][0] += 1
        test_set = set()
        for stratum, quota in zip((positives, negatives), quotas):
            stratum = stratum[:]
            rng.shuffle(stratum)
            test_set.update(stratum[: quota[0]])

    train_items = tuple(item for i, item in enumerate(corpus.items) if i not in test_set)
    test_items = tuple(item for i, item in enumerate(corpus.items) if i in test_set)
    return (
        Corpus(items=train_items, provenance=corpus.provenance),
        Corpus(items=test_items, provenance=corpus.provenance),
    )


# ---------------------------------------------------------------------------
# Label statistics


@dataclass(frozen=True)
class Distribution:
    n_items: int
    positives: dict[str, int]
    prevalence: dict[str, float]
    cooccurrence: tuple[tuple[int, ...], ...]  # 25 x 25, canonical label order

    def to_dict(self) -> dict:
        return {
            "n_items": self.n_items,
            "positives": self.positives,
            "prevalence": self.prevalence,
            "labels": list(taxonomy.ALL_SLUGS),
            "cooccurrence": [list(row) for row in self.cooccurrence],
        }


def label_distribution(corpus: Corpus) -> Distribution:
    vectors = [item.gold for item in corpus.items if item.gold is not None]
    if not vectors:
        raise ValidationError("corpus has no gold labels")
    n = len(vectors)
    bits = [v.bits() for v in vectors]
    positives = {
        slug: sum(b[j] for b in bits) for j, slug in enumerate(taxonomy.ALL_SLUGS)
    }
    prevalence = {slug: positives[slug] / n for slug in taxonomy.ALL_SLUGS}
    size = taxonomy.N_LABELS
    matrix = [
        tuple(sum(1 for b in bits if b[i] and b[j]) for j in range(size))
        for i in range(size)
    ]
    return Distribution(
        n_items=n,
        positives=positives,
        prevalence=prevalence,
        cooccurrence=tuple(matrix),
    )

"""Flat vs. hierarchical multi-label prediction over pluggable scorers.

A scorer exposes per-label scores in [0, 1] for a declared label subset.
Flat prediction thresholds all 25 labels independently and may produce a
hierarchy-inconsistent vector (reported raw, with the offending specifics
flagged).  Hierarchical prediction gates: generals are thresholded first,
and only the specific scorers of fired generals are invoked at all, so the
output is consistent by construction and gated-off scorers stay cold.

Thresholding is ``score >= threshold`` (default 0.5), so a rule engine's
hard 1.0 scores fire at any threshold <= 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

from . import taxonomy
from .errors import ValidationError
from .labels import LabelVector
from .reviews import Review
from .rules import RuleConfig, tag_review

DEFAULT_THRESHOLD = 0.5


class LabelScorer(Protocol):
    """Scoring interface: per-label scores in [0, 1] for declared labels."""

    @property
    def labels(self) -> tuple[str, ...]: ...

    def score(self, review: Review) -> Mapping[str, float]: ...


class RuleScorer:
    """Scores every label 1.0 or 0.0 from the rule tagger's output."""

    def __init__(self, config: RuleConfig, subset: Sequence[str] | None = None):
        self.config = config
        self._labels = tuple(subset) if subset is not None else taxonomy.ALL_SLUGS

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def score(self, review: Review) -> dict[str, float]:
        vector, _ = tag_review(review, self.config)
        return {slug: 1.0 if vector.get(slug) else 0.0 for slug in self._labels}


class TableScorer:
    """Scores looked up from a precomputed table keyed by review id.

    The JSONL exchange format is one row per review: ``{"review_id": ...,
    "<label_slug>": <score>, ...}``, which lets externally trained models
    plug into the same evaluation path as the in-repo scorers.
    """

    def __init__(self, scores: Mapping[str, Mapping[str, float]], labels: Sequence[str]):
        self._labels = tuple(labels)
        self._scores = {rid: dict(row) for rid, row in scores.items()}
        for rid, row in self._scores.items():
            for slug in self._labels:
                value = row.get(slug)
                if value is None:
                    raise ValidationError(f"review {rid!r}: missing score for {slug!r}")
                if not isinstance(value, (int, float)) or not math.isfinite(value) or not 0 <= value <= 1:
                    raise ValidationError(
                        f"review {rid!r}: score for {slug!r} must be in [0,1], got {value!r}"
                    )

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def score(self, review: Review) -> dict[str, float]:
        try:
            row = self._scores[review.id]
        except KeyError:
            raise ValidationError(f"no scores for review {review.id!r}") from None
        return {slug: float(row[slug]) for slug in self._labels}

    def subset(self, labels: Sequence[str]) -> "TableScorer":
        return TableScorer(self._scores, labels)


class GoldGeneralScorer:
    """Stage-1 scorer backed by gold general labels (gold-gated evaluation)."""

    labels = taxonomy.GENERALS

    def __init__(self, gold: Mapping[str, LabelVector]):
        self._gold = gold

    def score(self, review: Review) -> dict[str, float]:
        try:
            vector = self._gold[review.id]
        except KeyError:
            raise ValidationError(f"no gold labels for review {review.id!r}") from None
        return {g: 1.0 if vector.get(g) else 0.0 for g in taxonomy.GENERALS}


def load_score_table(path: str) -> dict[str, dict[str, float]]:
    """Read a score-table JSONL file into {review_id: {slug: score}}."""
    rows: dict[str, dict[str, float]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
            rid = row.pop("review_id", None)
            if not rid:
                raise ValidationError(f"{path}:{lineno}: missing review_id")
            if rid in rows:
                raise ValidationError(f"{path}:{lineno}: duplicate review_id {rid!r}")
            unknown = [k for k in row if not taxonomy.is_label(k)]
            if unknown:
                raise ValidationError(f"{path}:{lineno}: unknown label(s): {unknown}")
            rows[rid] = row
    return rows


def _check_coverage(
    general_scorer: LabelScorer, specific_scorers: Mapping[str, LabelScorer]
) -> None:
    missing = [g for g in taxonomy.GENERALS if g not in general_scorer.labels]
    if missing:
        raise ValidationError(f"general scorer does not cover: {missing}")
    for general in taxonomy.GENERALS:
        scorer = specific_scorers.get(general)
        if scorer is None:
            raise ValidationError(f"missing specific scorer for {general}")
        missing = [s for s in taxonomy.specifics_of(general) if s not in scorer.labels]
        if missing:
            raise ValidationError(f"{general} scorer does not cover: {missing}")


def _checked(scores: Mapping[str, float], slug: str) -> float:
    try:
        value = scores[slug]
    except KeyError:
        raise ValidationError(f"scorer output missing label {slug!r}") from None
    if not isinstance(value, (int, float)) or not math.isfinite(value) or not 0 <= value <= 1:
        raise ValidationError(f"invalid score for {slug!r}: {value!r}")
    return value


@dataclass(frozen=True)
class Prediction:
    vector: LabelVector
    # specifics predicted true while their parent general was not (flat only)
    inconsistent: tuple[str, ...] = ()


def predict_flat(
    review: Review,
    general_scorer: LabelScorer,
    specific_scorers: Mapping[str, LabelScorer],
    threshold: float = DEFAULT_THRESHOLD,
) -> Prediction:
    """Threshold every label independently; no gating, no silent repair."""
    _check_coverage(general_scorer, specific_scorers)
    general_scores = general_scorer.score(review)
    general = tuple(
        _checked(general_scores, g) >= threshold for g in taxonomy.GENERALS
    )
    specific = [False] * taxonomy.N_SPECIFIC
    for general_slug in taxonomy.GENERALS:
        scores = specific_scorers[general_slug].score(review)
        for si in taxonomy.specific_indices_of(general_slug):
            specific[si] = _checked(scores, taxonomy.SPECIFIC_SLUGS[si]) >= threshold
    vector = LabelVector(general, tuple(specific))
    return Prediction(vector=vector, inconsistent=vector.inconsistent_specifics())


def predict_hierarchical(
    review: Review,
    general_scorer: LabelScorer,
    specific_scorers: Mapping[str, LabelScorer],
    threshold: float = DEFAULT_THRESHOLD,
) -> Prediction:
    """Two-stage gated prediction.

    Stage 1 thresholds the generals; stage 2 invokes only the specific
    scorers whose general fired.  Equals ``enforce_hierarchy`` applied to
    the flat prediction with gated-off specific scores treated as 0.
    """
    _check_coverage(general_scorer, specific_scorers)
    general_scores = general_scorer.score(review)
    general = tuple(
        _checked(general_scores, g) >= threshold for g in taxonomy.GENERALS
    )
    specific = [False] * taxonomy.N_SPECIFIC
    for gi, slug in enumerate(taxonomy.GENERALS):
        if not general[gi]:
            continue
        scores = specific_scorers[slug].score(review)
        for si in taxonomy.specific_indices_of(slug):
            specific[si] = _checked(scores, taxonomy.SPECIFIC_SLUGS[si]) >= threshold
    return Prediction(vector=LabelVector(general, tuple(specific)))


@dataclass(frozen=True)
class ClassWeights:
    """Inverse-frequency positive-class weights: weight_i = N / positives_i,
    clamped to N for labels that never occur (those are flagged)."""

    n_items: int
    weights: dict[str, float]
    zero_positive: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "n_items": self.n_items,
            "weights": self.weights,
            "zero_positive": list(self.zero_positive),
        }


def inverse_frequency_weights(corpus_labels: Sequence[LabelVector]) -> ClassWeights:
    n = len(corpus_labels)
    if n == 0:
        raise ValidationError("cannot compute class weights on an empty corpus")
    weights: dict[str, float] = {}
    zero: list[str] = []
    for slug in taxonomy.ALL_SLUGS:
        positives = sum(1 for v in corpus_labels if v.get(slug))
        if positives == 0:
            zero.append(slug)
        weights[slug] = n / max(1, positives)
    return ClassWeights(n_items=n, weights=weights, zero_positive=tuple(zero))

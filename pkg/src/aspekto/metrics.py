"""Evaluation metrics for multi-label aspect identification and extraction.

All functions are pure and compute directly from integer confusion counts,
so results are exact up to a final float division:

    exact match   = |{i : pred_i == gold_i on every in-scope label}| / N
    hamming loss  = mismatched (item, label) cells / (N * L)
    precision     = TP / (TP + FP)        recall = TP / (TP + FN)
    F1            = 2PR / (P + R)
    macro F1      = unweighted mean of per-label F1
    micro F1      = F1 of pooled TP/FP/FN

Zero-denominator precision/recall/F1 report 0.0 and are flagged as
undefined rather than raised, matching how all-negative labels are scored.
"""

from __future__ import annotations

import json
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import taxonomy
from .errors import ValidationError
from .labels import LabelVector
from .reviews import AspectSpan

SCOPES = ("general", "specific", "all")


def _scope_slugs(scope: str) -> tuple[str, ...]:
    if scope == "general":
        return taxonomy.GENERALS
    if scope == "specific":
        return taxonomy.SPECIFIC_SLUGS
    if scope == "all":
        return taxonomy.ALL_SLUGS
    raise ValidationError(f"unknown scope: {scope!r} (expected one of {SCOPES})")


def _bits(vector: LabelVector, scope: str) -> tuple[bool, ...]:
    if scope == "general":
        return vector.general
    if scope == "specific":
        return vector.specific
    return vector.bits()


def _check_aligned(gold: Sequence[LabelVector], pred: Sequence[LabelVector]) -> None:
    if len(gold) == 0:
        raise ValidationError("empty prediction set")
    if len(gold) != len(pred):
        raise ValidationError(
            f"gold and pred lengths differ: {len(gold)} vs {len(pred)}"
        )


@dataclass(frozen=True)
class LabelPrf:
    """Per-label confusion counts and derived rates."""

    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    undefined: tuple[str, ...] = ()  # which of P/R/F1 had a zero denominator

    @property
    def support(self) -> int:
        return self.tp + self.fn


def _prf(tp: int, fp: int, fn: int, tn: int = 0) -> LabelPrf:
    undefined = []
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision, undefined = 0.0, undefined + ["precision"]
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall, undefined = 0.0, undefined + ["recall"]
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1, undefined = 0.0, undefined + ["f1"]
    return LabelPrf(tp, fp, fn, tn, precision, recall, f1, tuple(undefined))


def exact_match(
    gold: Sequence[LabelVector], pred: Sequence[LabelVector], scope: str = "all"
) -> float:
    """Fraction of items whose vectors agree on every in-scope label."""
    _check_aligned(gold, pred)
    hits = sum(
        1 for g, p in zip(gold, pred) if _bits(g, scope) == _bits(p, scope)
    )
    return hits / len(gold)


def hamming_loss(
    gold: Sequence[LabelVector], pred: Sequence[LabelVector], scope: str = "all"
) -> float:
    """Mismatched (item, label) cells over all cells."""
    _check_aligned(gold, pred)
    n_labels = len(_scope_slugs(scope))
    mismatched = sum(
        sum(gb != pb for gb, pb in zip(_bits(g, scope), _bits(p, scope)))
        for g, p in zip(gold, pred)
    )
    return mismatched / (len(gold) * n_labels)


def confusion_counts(
    gold: Sequence[LabelVector], pred: Sequence[LabelVector], scope: str = "all"
) -> dict[str, tuple[int, int, int, int]]:
    """Per-label (TP, FP, FN, TN) over the in-scope labels."""
    _check_aligned(gold, pred)
    slugs = _scope_slugs(scope)
    counts = {}
    for j, slug in enumerate(slugs):
        tp = fp = fn = tn = 0
        for g, p in zip(gold, pred):
            gb = _bits(g, scope)[j]
            pb = _bits(p, scope)[j]
            if gb and pb:
                tp += 1
            elif not gb and pb:
                fp += 1
            elif gb and not pb:
                fn += 1
            else:
                tn += 1
        counts[slug] = (tp, fp, fn, tn)
    return counts


@dataclass(frozen=True)
class PrfTable:
    per_label: dict[str, LabelPrf]
    macro_f1: float
    micro_f1: float
    micro: LabelPrf


def prf_per_label(
    gold: Sequence[LabelVector], pred: Sequence[LabelVector], scope: str = "all"
) -> PrfTable:
    """Per-label PRF plus macro (mean of per-label F1) and micro (pooled)."""
    counts = confusion_counts(gold, pred, scope)
    per_label = {slug: _prf(*c) for slug, c in counts.items()}
    macro_f1 = sum(p.f1 for p in per_label.values()) / len(per_label)
    pooled = _prf(
        sum(c[0] for c in counts.values()),
        sum(c[1] for c in counts.values()),
        sum(c[2] for c in counts.values()),
        sum(c[3] for c in counts.values()),
    )
    return PrfTable(per_label, macro_f1, pooled.f1, pooled)


def category_prf(
    gold: Sequence[LabelVector], pred: Sequence[LabelVector]
) -> dict[str, LabelPrf]:
    """Per-general PRF over specific labels, micro-pooling each general's children."""
    counts = confusion_counts(gold, pred, scope="specific")
    out = {}
    for general in taxonomy.GENERALS:
        children = taxonomy.specifics_of(general)
        out[general] = _prf(
            sum(counts[c][0] for c in children),
            sum(counts[c][1] for c in children),
            sum(counts[c][2] for c in children),
            sum(counts[c][3] for c in children),
        )
    return out


@dataclass(frozen=True)
class EvalReport:
    scope: str
    n_items: int
    n_labels: int
    exact_match: float
    hamming_loss: float
    macro_f1: float
    micro_f1: float
    per_label: dict[str, LabelPrf]
    per_category: dict[str, LabelPrf]

    def to_dict(self) -> dict:
        def prf_dict(p: LabelPrf) -> dict:
            d = {
                "precision": p.precision,
                "recall": p.recall,
                "f1": p.f1,
                "tp": p.tp,
                "fp": p.fp,
                "fn": p.fn,
                "tn": p.tn,
            }
            if p.undefined:
                d["undefined"] = list(p.undefined)
            return d

        return {
            "scope": self.scope,
            "n_items": self.n_items,
            "n_labels": self.n_labels,
            "exact_match": self.exact_match,
            "hamming_loss": self.hamming_loss,
            "macro_f1": self.macro_f1,
            "micro_f1": self.micro_f1,
            "per_label": {s: prf_dict(p) for s, p in self.per_label.items()},
            "per_category": {s: prf_dict(p) for s, p in self.per_category.items()},
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_table(self) -> str:
        """Plain-text table: overall metrics, then per-category P/R/F1 rows."""
        lines = [
            f"Scope: {self.scope}   items: {self.n_items}   labels: {self.n_labels}",
            "",
            f"{'Metric':<14}{'Value':>8}",
            f"{'Exact Match':<14}{self.exact_match:>8.4f}",
            f"{'Hamming Loss':<14}{self.hamming_loss:>8.4f}",
            f"{'Macro F1':<14}{self.macro_f1:>8.4f}",
            f"{'Micro F1':<14}{self.micro_f1:>8.4f}",
            "",
            f"{'Category':<10}{'Precision':>10}{'Recall':>10}{'F1':>10}",
        ]
        for general, prf in self.per_category.items():
            lines.append(
                f"{general:<10}{prf.precision:>10.4f}{prf.recall:>10.4f}{prf.f1:>10.4f}"
            )
        return "\n".join(lines)


def evaluate(
    gold: Sequence[LabelVector], pred: Sequence[LabelVector], scope: str = "all"
) -> EvalReport:
    """Full report: EM, Hamming, per-label/macro/micro PRF, per-category PRF."""
    table = prf_per_label(gold, pred, scope)
    if scope == "general":
        per_category = dict(table.per_label)
    else:
        per_category = category_prf(gold, pred)
    return EvalReport(
        scope=scope,
        n_items=len(gold),
        n_labels=len(_scope_slugs(scope)),
        exact_match=exact_match(gold, pred, scope),
        hamming_loss=hamming_loss(gold, pred, scope),
        macro_f1=table.macro_f1,
        micro_f1=table.micro_f1,
        per_label=table.per_label,
        per_category=per_category,
    )


# ---------------------------------------------------------------------------
# Token-level span extraction scoring


def span_tokens(surface: str) -> list[str]:
    """Normalize a span surface into tokens: lowercase, strip punctuation,
    split on whitespace.  Fixed so that scores are comparable across runs."""
    lowered = surface.lower()
    stripped = "".join(
        ch for ch in lowered if not unicodedata.category(ch).startswith("P")
    )
    return stripped.split()


@dataclass(frozen=True)
class TokenPrf:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float


def token_f1(
    gold_spans: Mapping[str, Iterable[AspectSpan]],
    pred_spans: Mapping[str, Iterable[AspectSpan]],
) -> dict[str, TokenPrf]:
    """Token-multiset P/R/F1 per category, pooled across reviews.

    For each (review, category) the surfaces of all its spans are
    normalized into one token multiset; TP is the multiset intersection
    size, FP the predicted surplus, FN the gold surplus.  Re-segmenting a
    span without changing its token multiset therefore changes nothing.
    """

    def group(spans_by_review) -> dict[tuple[str, str], Counter]:
        grouped: dict[tuple[str, str], Counter] = {}
        for review_id, spans in spans_by_review.items():
            for span in spans:
                key = (review_id, span.category)
                grouped.setdefault(key, Counter()).update(span_tokens(span.surface))
        return grouped

    gold_grouped = group(gold_spans)
    pred_grouped = group(pred_spans)
    pooled = {g: [0, 0, 0] for g in taxonomy.GENERALS}  # tp, fp, fn
    for key in gold_grouped.keys() | pred_grouped.keys():
        gold_counter = gold_grouped.get(key, Counter())
        pred_counter = pred_grouped.get(key, Counter())
        tp = sum((gold_counter & pred_counter).values())
        pooled[key[1]][0] += tp
        pooled[key[1]][1] += sum(pred_counter.values()) - tp
        pooled[key[1]][2] += sum(gold_counter.values()) - tp
    out = {}
    for general, (tp, fp, fn) in pooled.items():
        prf = _prf(tp, fp, fn)
        out[general] = TokenPrf(tp, fp, fn, prf.precision, prf.recall, prf.f1)
    return out


# ---------------------------------------------------------------------------
# Inter-annotator agreement


def fleiss_kappa(counts: Sequence[Sequence[int]]) -> float:
    """Fleiss' kappa from an N x k matrix of per-item category counts.

                 P-bar - Pe-bar
        kappa =  --------------
                  1 - Pe-bar

    where P-bar is the mean per-item pairwise agreement
    P_i = (sum_j n_ij^2 - n) / (n (n - 1)) and Pe-bar = sum_j p_j^2 with
    p_j the overall share of ratings in category j.  Every item must be
    rated by the same number n >= 2 of annotators.  Returns exactly 1.0
    when P-bar = 1, which also guards the 0/0 case of unanimous ratings
    in a single category.
    """
    if len(counts) == 0:
        raise ValidationError("no items to compute agreement over")
    n = sum(counts[0])
    if n < 2:
        raise ValidationError("need at least 2 ratings per item")
    k = len(counts[0])
    for row in counts:
        if len(row) != k:
            raise ValidationError("ragged category counts")
        if any(c < 0 for c in row):
            raise ValidationError("negative rating count")
        if sum(row) != n:
            raise ValidationError("every item must have the same number of ratings")

    n_items = len(counts)
    p_bar = sum(
        (sum(c * c for c in row) - n) / (n * (n - 1)) for row in counts
    ) / n_items
    if p_bar == 1.0:
        return 1.0
    totals = [sum(row[j] for row in counts) for j in range(k)]
    p_e = sum((t / (n_items * n)) ** 2 for t in totals)
    return (p_bar - p_e) / (1 - p_e)


def assignments_to_counts(
    assignments: Sequence[Sequence[int]], n_categories: int
) -> list[list[int]]:
    """Convert an items x annotators matrix of category ids to count rows."""
    rows = []
    for item in assignments:
        row = [0] * n_categories
        for category in item:
            if not 0 <= category < n_categories:
                raise ValidationError(f"category id out of range: {category}")
            row[category] += 1
        rows.append(row)
    return rows


def fleiss_kappa_per_label(
    annotations: Sequence[Sequence[LabelVector]],
) -> tuple[dict[str, float], float]:
    """Multi-label agreement: binary (present/absent) kappa per label.

    ``annotations[a][i]`` is annotator ``a``'s vector for item ``i``.
    Returns per-label kappa plus the unweighted mean over the 25 labels.
    """
    if len(annotations) < 2:
        raise ValidationError("need at least 2 annotators")
    n_items = len(annotations[0])
    if any(len(per_annotator) != n_items for per_annotator in annotations):
        raise ValidationError("annotators rated different item counts")
    if n_items == 0:
        raise ValidationError("no items to compute agreement over")
    per_label = {}
    for slug in taxonomy.ALL_SLUGS:
        counts = []
        for i in range(n_items):
            present = sum(1 for per_annotator in annotations if per_annotator[i].get(slug))
            counts.append([present, len(annotations) - present])
        per_label[slug] = fleiss_kappa(counts)
    mean = sum(per_label.values()) / len(per_label)
    return per_label, mean

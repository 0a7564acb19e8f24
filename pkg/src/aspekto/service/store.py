"""Persistent store for human calibration campaigns.

Each campaign is an append-only JSONL event log (created / round_opened /
annotation / round_closed / audit events) in the store directory; startup
replays every log, so restarting the service preserves all rounds.  Writes
go through one lock per store -- the single-writer discipline that keeps
the logs consistent under concurrent requests.  All agreement math is
delegated to the metrics module; the store only shapes inputs.
"""

from __future__ import annotations

import json
import os
import random
import re
import threading
from dataclasses import dataclass, field
from typing import Optional

from .. import metrics
from ..corpus import Corpus, load_corpus, load_predictions
from ..errors import ValidationError
from ..labels import LabelVector
from ..reviews import AspectSpan


class UnknownResourceError(KeyError):
    """Campaign, round or review that does not exist (HTTP 404)."""


class DuplicateAnnotationError(ValueError):
    """Same annotator re-submitting for the same (round, review) (HTTP 409)."""


_ID_RE = re.compile(r"[^a-z0-9-]+")


def _slug_id(name: str) -> str:
    return _ID_RE.sub("-", name.lower()).strip("-") or "campaign"


@dataclass
class Annotation:
    annotator: str
    review_id: str
    labels: LabelVector
    spans: tuple[AspectSpan, ...] = ()


@dataclass
class Round:
    number: int
    status: str = "open"  # open | closed
    annotations: dict = field(default_factory=dict)  # (annotator, review_id) -> Annotation

    def annotators(self) -> list[str]:
        return sorted({a.annotator for a in self.annotations.values()})


@dataclass
class PendingAudit:
    index: int
    seed: int
    sampled_ids: tuple[str, ...]
    llm_labels: dict


@dataclass
class AuditRecord:
    index: int
    seed: int
    sampled_ids: tuple[str, ...]
    llm_labels: dict
    verdicts: dict
    accuracy: float


@dataclass
class Campaign:
    id: str
    name: str
    corpus_path: str
    corpus: Corpus
    llm_labels: dict  # review id -> list of true slugs (may be empty)
    rounds: list = field(default_factory=list)
    audits: list = field(default_factory=list)  # AuditRecord
    pending_audit: Optional[PendingAudit] = None

    def round(self, number: int) -> Round:
        for r in self.rounds:
            if r.number == number:
                return r
        raise UnknownResourceError(f"campaign {self.id!r} has no round {number}")

    def open_round(self) -> Optional[Round]:
        for r in self.rounds:
            if r.status == "open":
                return r
        return None

    def audited_ids(self) -> set[str]:
        return {rid for a in self.audits for rid in a.sampled_ids}


class CalibrationStore:
    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)
        self._lock = threading.Lock()
        self._campaigns: dict[str, Campaign] = {}
        self._replay_all()

    # -- persistence ------------------------------------------------------
    # campaign logs carry a dedicated suffix so other files a tool drops in
    # the store directory (exports, prediction files) are never replayed

    def _log_path(self, campaign_id: str) -> str:
        return os.path.join(self.directory, f"{campaign_id}.events.jsonl")

    def _append(self, campaign_id: str, event: dict) -> None:
        with open(self._log_path(campaign_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _replay_all(self) -> None:
        for name in sorted(os.listdir(self.directory)):
            if name.endswith(".events.jsonl"):
                self._replay(os.path.join(self.directory, name))

    def _replay(self, path: str) -> None:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    self._apply(json.loads(line), persist=False)

    # -- event application --------------------------------------------------

    def _apply(self, event: dict, persist: bool = True) -> dict:
        kind = event["event"]
        handler = getattr(self, f"_on_{kind}")
        result = handler(event)
        if persist:
            self._append(event["campaign"], event)
        return result

    def _on_campaign_created(self, event: dict) -> dict:
        corpus, _ = load_corpus(event["corpus_path"], mode="strict")
        llm_labels: dict = {}
        if event.get("llm_labels_path"):
            predictions = load_predictions(event["llm_labels_path"])
            llm_labels = {
                rid: list(v.true_slugs()) if v is not None else None
                for rid, v in predictions.items()
            }
        campaign = Campaign(
            id=event["campaign"],
            name=event["name"],
            corpus_path=event["corpus_path"],
            corpus=corpus,
            llm_labels=llm_labels,
        )
        self._campaigns[campaign.id] = campaign
        return {"id": campaign.id}

    def _on_round_opened(self, event: dict) -> dict:
        campaign = self._get(event["campaign"])
        campaign.rounds.append(Round(number=event["round"]))
        return {"round": event["round"]}

    def _on_round_closed(self, event: dict) -> dict:
        campaign = self._get(event["campaign"])
        campaign.round(event["round"]).status = "closed"
        return {"round": event["round"], "status": "closed"}

    def _on_annotation(self, event: dict) -> dict:
        campaign = self._get(event["campaign"])
        round_ = campaign.round(event["round"])
        item = campaign.corpus.get(event["review_id"])  # raises KeyError if unknown
        vector = LabelVector.from_map(event["labels"], strict=True)
        spans = tuple(
            AspectSpan.from_text(item.review.text, s["start"], s["end"], s["category"])
            for s in event.get("spans", [])
        )
        key = (event["annotator"], event["review_id"])
        round_.annotations[key] = Annotation(
            annotator=event["annotator"],
            review_id=event["review_id"],
            labels=vector,
            spans=spans,
        )
        return {"round": round_.number, "review_id": event["review_id"]}

    def _on_audit_sampled(self, event: dict) -> dict:
        campaign = self._get(event["campaign"])
        campaign.pending_audit = PendingAudit(
            index=event["index"],
            seed=event["seed"],
            sampled_ids=tuple(event["sampled_ids"]),
            llm_labels=event["llm_labels"],
        )
        return {"index": event["index"], "sampled_ids": event["sampled_ids"]}

    def _on_audit_recorded(self, event: dict) -> dict:
        campaign = self._get(event["campaign"])
        campaign.audits.append(
            AuditRecord(
                index=event["index"],
                seed=event["seed"],
                sampled_ids=tuple(event["sampled_ids"]),
                llm_labels=event["llm_labels"],
                verdicts=event["verdicts"],
                accuracy=event["accuracy"],
            )
        )
        campaign.pending_audit = None
        return {"index": event["index"], "accuracy": event["accuracy"]}

    # -- public API ---------------------------------------------------------

    def _get(self, campaign_id: str) -> Campaign:
        try:
            return self._campaigns[campaign_id]
        except KeyError:
            raise UnknownResourceError(f"unknown campaign: {campaign_id!r}") from None

    def list_campaigns(self) -> list[Campaign]:
        return list(self._campaigns.values())

    def get_campaign(self, campaign_id: str) -> Campaign:
        return self._get(campaign_id)

    def create_campaign(
        self, name: str, corpus_path: str, llm_labels_path: Optional[str] = None
    ) -> Campaign:
        with self._lock:
            campaign_id = base = _slug_id(name)
            suffix = 2
            while campaign_id in self._campaigns:
                campaign_id = f"{base}-{suffix}"
                suffix += 1
            self._apply(
                {
                    "event": "campaign_created",
                    "campaign": campaign_id,
                    "name": name,
                    "corpus_path": corpus_path,
                    "llm_labels_path": llm_labels_path,
                }
            )
            return self._campaigns[campaign_id]

    def open_round(self, campaign_id: str) -> Round:
        with self._lock:
            campaign = self._get(campaign_id)
            if campaign.open_round() is not None:
                raise DuplicateAnnotationError(
                    f"campaign {campaign_id!r} already has an open round"
                )
            number = len(campaign.rounds) + 1
            self._apply({"event": "round_opened", "campaign": campaign_id, "round": number})
            return campaign.round(number)

    def close_round(self, campaign_id: str, number: int) -> Round:
        with self._lock:
            campaign = self._get(campaign_id)
            round_ = campaign.round(number)
            if round_.status == "closed":
                raise DuplicateAnnotationError(f"round {number} is already closed")
            self._apply({"event": "round_closed", "campaign": campaign_id, "round": number})
            return round_

    def add_annotation(
        self,
        campaign_id: str,
        round_number: int,
        review_id: str,
        annotator: str,
        labels: dict,
        spans: Optional[list] = None,
    ) -> dict:
        with self._lock:
            campaign = self._get(campaign_id)
            round_ = campaign.round(round_number)
            if round_.status != "open":
                raise ValidationError(f"round {round_number} is closed")
            try:
                campaign.corpus.get(review_id)
            except KeyError:
                raise UnknownResourceError(f"unknown review: {review_id!r}") from None
            if (annotator, review_id) in round_.annotations:
                raise DuplicateAnnotationError(
                    f"{annotator!r} already annotated {review_id!r} in round {round_number}"
                )
            return self._apply(
                {
                    "event": "annotation",
                    "campaign": campaign_id,
                    "round": round_number,
                    "review_id": review_id,
                    "annotator": annotator,
                    "labels": labels,
                    "spans": spans or [],
                }
            )

    def next_unlabeled(
        self, campaign_id: str, round_number: int, annotator: str
    ) -> Optional[dict]:
        campaign = self._get(campaign_id)
        round_ = campaign.round(round_number)
        for item in campaign.corpus:
            if (annotator, item.review.id) not in round_.annotations:
                return {
                    "id": item.review.id,
                    "text": item.review.text,
                    "source": item.review.source,
                }
        return None

    def agreement(self, campaign_id: str, round_number: int) -> dict:
        """Fleiss' kappa per label and mean over the round's common items."""
        campaign = self._get(campaign_id)
        round_ = campaign.round(round_number)
        annotators = round_.annotators()
        if len(annotators) < 2:
            return {
                "available": False,
                "reason": "need at least 2 annotators",
                "annotators": annotators,
            }
        rated_by_all = [
            item.review.id
            for item in campaign.corpus
            if all((a, item.review.id) in round_.annotations for a in annotators)
        ]
        if not rated_by_all:
            return {
                "available": False,
                "reason": "no review was rated by every annotator",
                "annotators": annotators,
            }
        matrix = [
            [round_.annotations[(a, rid)].labels for rid in rated_by_all]
            for a in annotators
        ]
        per_label, mean = metrics.fleiss_kappa_per_label(matrix)
        return {
            "available": True,
            "annotators": annotators,
            "n_items": len(rated_by_all),
            "review_ids": rated_by_all,
            "per_label": per_label,
            "mean": mean,
        }

    def disagreements(self, campaign_id: str, round_number: int) -> list[dict]:
        """Reviews where annotators in the round do not fully agree."""
        campaign = self._get(campaign_id)
        round_ = campaign.round(round_number)
        annotators = round_.annotators()
        out = []
        for item in campaign.corpus:
            vectors = {
                a: round_.annotations[(a, item.review.id)].labels
                for a in annotators
                if (a, item.review.id) in round_.annotations
            }
            if len(vectors) >= 2 and len({v.bits() for v in vectors.values()}) > 1:
                out.append(
                    {
                        "review_id": item.review.id,
                        "text": item.review.text,
                        "labels": {a: list(v.true_slugs()) for a, v in vectors.items()},
                    }
                )
        return out

    # -- LLM audit ------------------------------------------------------------

    def start_audit(self, campaign_id: str, sample_size: int, seed: int) -> PendingAudit:
        with self._lock:
            campaign = self._get(campaign_id)
            if campaign.pending_audit is not None:
                raise DuplicateAnnotationError("an audit round is already pending")
            labeled = [
                rid for rid, slugs in campaign.llm_labels.items() if slugs is not None
            ]
            pool = [rid for rid in labeled if rid not in campaign.audited_ids()]
            if sample_size < 1:
                raise ValidationError("sample_size must be >= 1")
            if sample_size > len(pool):
                raise ValidationError(
                    f"sample_size {sample_size} exceeds unaudited labeled reviews ({len(pool)})"
                )
            sampled = random.Random(seed).sample(pool, sample_size)
            event = {
                "event": "audit_sampled",
                "campaign": campaign_id,
                "index": len(campaign.audits) + 1,
                "seed": seed,
                "sampled_ids": sampled,
                "llm_labels": {rid: campaign.llm_labels[rid] for rid in sampled},
            }
            self._apply(event)
            return campaign.pending_audit

    def record_audit_verdicts(self, campaign_id: str, index: int, verdicts: dict) -> AuditRecord:
        with self._lock:
            campaign = self._get(campaign_id)
            pending = campaign.pending_audit
            if pending is None or pending.index != index:
                raise UnknownResourceError(f"no pending audit round {index}")
            missing = [rid for rid in pending.sampled_ids if rid not in verdicts]
            if missing:
                raise ValidationError(f"missing verdicts for: {missing}")
            correct = sum(1 for rid in pending.sampled_ids if verdicts[rid])
            event = {
                "event": "audit_recorded",
                "campaign": campaign_id,
                "index": pending.index,
                "seed": pending.seed,
                "sampled_ids": list(pending.sampled_ids),
                "llm_labels": pending.llm_labels,
                "verdicts": {rid: bool(verdicts[rid]) for rid in pending.sampled_ids},
                "accuracy": correct / len(pending.sampled_ids),
            }
            self._apply(event)
            return campaign.audits[-1]

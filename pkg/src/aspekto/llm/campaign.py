"""Round-tracked validation of an LLM annotation campaign.

After a corpus is machine-annotated, random samples are pulled for human
inspection; each inspection round records which reviews were checked, the
verdicts, the sampling seed and the prompt version in play, and the running
accuracy.  Rounds are append-only so the audit trail never rewrites
history; campaigns persist as JSONL, one round per line.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from ..errors import ValidationError

CAMPAIGN_KIND = "annotation-campaign"
CAMPAIGN_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class AuditRound:
    index: int
    prompt_version: str
    seed: int
    sampled_ids: tuple[str, ...]
    llm_labels: dict[str, list[str]]  # review id -> true label slugs at audit time
    verdicts: dict[str, bool]  # review id -> human said the labels are correct
    accuracy: float

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "prompt_version": self.prompt_version,
            "seed": self.seed,
            "sampled_ids": list(self.sampled_ids),
            "llm_labels": self.llm_labels,
            "verdicts": self.verdicts,
            "accuracy": self.accuracy,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AuditRound":
        return cls(
            index=data["index"],
            prompt_version=data["prompt_version"],
            seed=data["seed"],
            sampled_ids=tuple(data["sampled_ids"]),
            llm_labels={k: list(v) for k, v in data["llm_labels"].items()},
            verdicts={k: bool(v) for k, v in data["verdicts"].items()},
            accuracy=data["accuracy"],
        )


@dataclass(frozen=True)
class AnnotationCampaign:
    id: str
    corpus_ref: str
    rounds: tuple[AuditRound, ...] = ()

    def audited_ids(self) -> set[str]:
        return {rid for r in self.rounds for rid in r.sampled_ids}


def sample_unaudited(
    campaign: AnnotationCampaign,
    candidate_ids: Sequence[str],
    sample_size: int,
    seed: int,
) -> list[str]:
    """Seeded random sample of not-yet-audited review ids."""
    if sample_size < 1:
        raise ValidationError("sample_size must be >= 1")
    pool = [rid for rid in candidate_ids if rid not in campaign.audited_ids()]
    if sample_size > len(pool):
        raise ValidationError(
            f"sample_size {sample_size} exceeds unaudited corpus size {len(pool)}"
        )
    return random.Random(seed).sample(pool, sample_size)


def record_audit_round(
    campaign: AnnotationCampaign,
    prompt_version: str,
    seed: int,
    sampled_ids: Sequence[str],
    llm_labels: Mapping[str, Sequence[str]],
    verdicts: Mapping[str, bool],
) -> AnnotationCampaign:
    """Append one audit round; accuracy = correct verdicts / sample size."""
    if not sampled_ids:
        raise ValidationError("cannot record an audit round with zero samples")
    missing = [rid for rid in sampled_ids if rid not in verdicts]
    if missing:
        raise ValidationError(f"missing verdicts for sampled reviews: {missing}")
    already = set(sampled_ids) & campaign.audited_ids()
    if already:
        raise ValidationError(f"reviews audited in an earlier round: {sorted(already)}")
    correct = sum(1 for rid in sampled_ids if verdicts[rid])
    audit_round = AuditRound(
        index=len(campaign.rounds) + 1,
        prompt_version=prompt_version,
        seed=seed,
        sampled_ids=tuple(sampled_ids),
        llm_labels={rid: list(llm_labels.get(rid, [])) for rid in sampled_ids},
        verdicts={rid: bool(verdicts[rid]) for rid in sampled_ids},
        accuracy=correct / len(sampled_ids),
    )
    return replace(campaign, rounds=campaign.rounds + (audit_round,))


def save_campaign(campaign: AnnotationCampaign, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "kind": CAMPAIGN_KIND,
            "schema_version": CAMPAIGN_SCHEMA_VERSION,
            "id": campaign.id,
            "corpus_ref": campaign.corpus_ref,
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for audit_round in campaign.rounds:
            fh.write(json.dumps(audit_round.to_dict(), ensure_ascii=False) + "\n")


def load_campaign(path: str) -> AnnotationCampaign:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in (l.strip() for l in fh) if line]
    if not lines:
        raise ValidationError(f"{path}: empty campaign file")
    header = json.loads(lines[0])
    if header.get("kind") != CAMPAIGN_KIND:
        raise ValidationError(f"{path}: not a campaign file")
    rounds = tuple(AuditRound.from_dict(json.loads(line)) for line in lines[1:])
    for i, audit_round in enumerate(rounds, start=1):
        if audit_round.index != i:
            raise ValidationError(f"{path}: round indices out of order")
    return AnnotationCampaign(
        id=header["id"], corpus_ref=header.get("corpus_ref", ""), rounds=rounds
    )

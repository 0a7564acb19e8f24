"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class TagRequest(BaseModel):
    text: str
    id: str = "adhoc"


class EvaluateRequest(BaseModel):
    gold: list[dict[str, bool]]
    pred: list[dict[str, bool]]
    scope: str = "all"


class CampaignCreate(BaseModel):
    name: str
    corpus_path: str
    llm_labels_path: Optional[str] = None


class CampaignInfo(BaseModel):
    id: str
    name: str
    corpus_path: str
    n_reviews: int
    rounds: list[RoundInfo]
    n_audit_rounds: int


class RoundInfo(BaseModel):
    number: int
    status: str
    annotators: list[str]
    n_annotations: int


class SpanIn(BaseModel):
    category: str
    start: int
    end: int


class AnnotationIn(BaseModel):
    campaign: str
    round: int
    review_id: str
    annotator: str
    labels: dict[str, bool]
    spans: list[SpanIn] = Field(default_factory=list)


class AuditStart(BaseModel):
    sample_size: int
    seed: int = 0


class AuditVerdicts(BaseModel):
    verdicts: dict[str, bool]


CampaignInfo.model_rebuild()

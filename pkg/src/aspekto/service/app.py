"""FastAPI application wrapping the core package.

The service is stateless apart from the calibration store; tagging and
evaluation call straight into the library so responses can never drift
from library output.  Mutating endpoints require a bearer token when the
``ASPEKTO_TOKEN`` environment variable is set (single shared token --
calibration teams are small).
"""

from __future__ import annotations

import os
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .. import metrics, taxonomy
from ..errors import ValidationError
from ..labels import LabelVector, canonical_label_json
from ..reviews import Review
from ..rules import RuleConfig, default_rules, load_rules, tag_review
from .schemas import (
    AnnotationIn,
    AuditStart,
    AuditVerdicts,
    CampaignCreate,
    CampaignInfo,
    EvaluateRequest,
    RoundInfo,
    TagRequest,
)
from .store import CalibrationStore, DuplicateAnnotationError, UnknownResourceError

TOKEN_ENV = "ASPEKTO_TOKEN"


def create_app(
    store_dir: str = "campaigns",
    rules_path: Optional[str] = None,
    token_env: str = TOKEN_ENV,
) -> FastAPI:
    app = FastAPI(title="aspekto", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    config: RuleConfig = load_rules(rules_path) if rules_path else default_rules()
    store = CalibrationStore(store_dir)
    app.state.store = store
    app.state.rules = config

    def require_token(request: Request) -> None:
        token = os.environ.get(token_env)
        if not token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")

    @app.exception_handler(ValidationError)
    async def validation_handler(request: Request, exc: ValidationError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(UnknownResourceError)
    async def unknown_handler(request: Request, exc: UnknownResourceError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=404, content={"detail": str(exc.args[0])})

    @app.exception_handler(DuplicateAnnotationError)
    async def duplicate_handler(request: Request, exc: DuplicateAnnotationError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=409, content={"detail": str(exc)})

    # -- pipeline endpoints -------------------------------------------------

    @app.get("/taxonomy")
    def get_taxonomy() -> dict:
        return taxonomy.taxonomy_document()

    @app.post("/tag")
    def post_tag(body: TagRequest, verbose: bool = Query(default=False)):
        vector, matches = tag_review(Review(id=body.id, text=body.text), config)
        if not verbose:
            # canonical bytes: exactly the library's serialization
            return Response(
                content=canonical_label_json(vector), media_type="application/json"
            )
        return {
            "labels": vector.as_map(),
            "matches": [
                {
                    "rule_id": m.rule_id,
                    "specific": m.specific,
                    "category": m.span.category,
                    "start": m.span.start,
                    "end": m.span.end,
                    "surface": m.span.surface,
                }
                for m in matches
            ],
        }

    @app.post("/evaluate")
    def post_evaluate(body: EvaluateRequest) -> dict:
        gold = [LabelVector.from_map(m, strict=False) for m in body.gold]
        pred = [LabelVector.from_map(m, strict=False) for m in body.pred]
        return metrics.evaluate(gold, pred, body.scope).to_dict()

    # -- calibration campaigns ------------------------------------------------

    def campaign_info(campaign) -> CampaignInfo:
        return CampaignInfo(
            id=campaign.id,
            name=campaign.name,
            corpus_path=campaign.corpus_path,
            n_reviews=len(campaign.corpus),
            rounds=[
                RoundInfo(
                    number=r.number,
                    status=r.status,
                    annotators=r.annotators(),
                    n_annotations=len(r.annotations),
                )
                for r in campaign.rounds
            ],
            n_audit_rounds=len(campaign.audits),
        )

    @app.get("/campaigns")
    def list_campaigns() -> list[CampaignInfo]:
        return [campaign_info(c) for c in store.list_campaigns()]

    @app.post("/campaigns", dependencies=[Depends(require_token)], status_code=201)
    def create_campaign(body: CampaignCreate) -> CampaignInfo:
        campaign = store.create_campaign(body.name, body.corpus_path, body.llm_labels_path)
        return campaign_info(campaign)

    @app.get("/campaigns/{campaign_id}")
    def get_campaign(campaign_id: str) -> CampaignInfo:
        return campaign_info(store.get_campaign(campaign_id))

    @app.get("/campaigns/{campaign_id}/rounds")
    def list_rounds(campaign_id: str) -> list[RoundInfo]:
        return campaign_info(store.get_campaign(campaign_id)).rounds

    @app.post(
        "/campaigns/{campaign_id}/rounds",
        dependencies=[Depends(require_token)],
        status_code=201,
    )
    def open_round(campaign_id: str) -> RoundInfo:
        round_ = store.open_round(campaign_id)
        return RoundInfo(
            number=round_.number, status=round_.status, annotators=[], n_annotations=0
        )

    @app.post(
        "/campaigns/{campaign_id}/rounds/{number}/close",
        dependencies=[Depends(require_token)],
    )
    def close_round(campaign_id: str, number: int) -> RoundInfo:
        round_ = store.close_round(campaign_id, number)
        return RoundInfo(
            number=round_.number,
            status=round_.status,
            annotators=round_.annotators(),
            n_annotations=len(round_.annotations),
        )

    @app.get("/reviews/next-unlabeled")
    def next_unlabeled(
        campaign: str, annotator: str, round: int = Query(alias="round")
    ) -> dict:
        review = store.next_unlabeled(campaign, round, annotator)
        if review is None:
            return {"done": True, "review": None}
        return {"done": False, "review": review}

    @app.post("/annotations", dependencies=[Depends(require_token)], status_code=201)
    def post_annotation(body: AnnotationIn) -> dict:
        return store.add_annotation(
            body.campaign,
            body.round,
            body.review_id,
            body.annotator,
            body.labels,
            [s.model_dump() for s in body.spans],
        )

    @app.get("/agreement")
    def get_agreement(campaign: str, round: int = Query(alias="round")) -> dict:
        return store.agreement(campaign, round)

    @app.get("/disagreements")
    def get_disagreements(campaign: str, round: int = Query(alias="round")) -> dict:
        return {"items": store.disagreements(campaign, round)}

    # -- LLM audit -------------------------------------------------------------

    @app.get("/campaigns/{campaign_id}/audit-rounds")
    def list_audit_rounds(campaign_id: str) -> dict:
        campaign = store.get_campaign(campaign_id)
        return {
            "rounds": [
                {
                    "index": a.index,
                    "seed": a.seed,
                    "sampled_ids": list(a.sampled_ids),
                    "verdicts": a.verdicts,
                    "accuracy": a.accuracy,
                }
                for a in campaign.audits
            ],
            "pending": (
                None
                if campaign.pending_audit is None
                else {
                    "index": campaign.pending_audit.index,
                    "seed": campaign.pending_audit.seed,
                    "sampled_ids": list(campaign.pending_audit.sampled_ids),
                    "llm_labels": campaign.pending_audit.llm_labels,
                }
            ),
        }

    @app.post(
        "/campaigns/{campaign_id}/audit-rounds",
        dependencies=[Depends(require_token)],
        status_code=201,
    )
    def start_audit(campaign_id: str, body: AuditStart) -> dict:
        campaign = store.get_campaign(campaign_id)
        pending = store.start_audit(campaign_id, body.sample_size, body.seed)
        reviews = {
            rid: campaign.corpus.get(rid).review.text for rid in pending.sampled_ids
        }
        return {
            "index": pending.index,
            "seed": pending.seed,
            "sampled_ids": list(pending.sampled_ids),
            "llm_labels": pending.llm_labels,
            "reviews": reviews,
        }

    @app.post(
        "/campaigns/{campaign_id}/audit-rounds/{index}/verdicts",
        dependencies=[Depends(require_token)],
    )
    def record_verdicts(campaign_id: str, index: int, body: AuditVerdicts) -> dict:
        record = store.record_audit_verdicts(campaign_id, index, body.verdicts)
        return {
            "index": record.index,
            "accuracy": record.accuracy,
            "verdicts": record.verdicts,
        }

    return app

"""Seed a demo calibration campaign for the annotation workbench.

Five closed rounds of two-annotator labels over the fixture corpus, with a
round-over-round mean kappa trend that rises toward 0.69, plus machine
labels from the rule tagger so the audit screen has material.  A sixth
round is left open for live labeling.
"""

from __future__ import annotations

import json
import os
from importlib import resources
from typing import Optional

from ..corpus import load_corpus, save_predictions, synthetic_corpus_path
from ..rules import default_rules, tag_review
from .store import CalibrationStore

DEMO_CAMPAIGN_NAME = "calibration demo"


def seed_demo_campaign(store: CalibrationStore) -> Optional[str]:
    """Create the demo campaign; returns its id, or None if already present."""
    existing = {c.name for c in store.list_campaigns()}
    if DEMO_CAMPAIGN_NAME in existing:
        return None

    corpus_path = synthetic_corpus_path()
    corpus, _ = load_corpus(corpus_path, mode="strict")
    config = default_rules()
    predictions = {
        item.review.id: tag_review(item.review, config)[0] for item in corpus
    }
    llm_labels_path = os.path.join(store.directory, "demo_llm_labels.jsonl")
    save_predictions(predictions, llm_labels_path)

    campaign = store.create_campaign(DEMO_CAMPAIGN_NAME, corpus_path, llm_labels_path)
    rounds = json.loads(
        resources.files("aspekto").joinpath("data", "demo_rounds.json").read_text("utf-8")
    )["rounds"]
    for round_data in rounds:
        store.open_round(campaign.id)
        for annotator, by_review in round_data["annotations"].items():
            for review_id in round_data["review_ids"]:
                store.add_annotation(
                    campaign.id,
                    round_data["number"],
                    review_id,
                    annotator,
                    {slug: True for slug in by_review[review_id]},
                )
        store.close_round(campaign.id, round_data["number"])
    store.open_round(campaign.id)  # live round for the labeling screen
    return campaign.id

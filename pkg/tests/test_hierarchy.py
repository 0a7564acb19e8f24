import json
import random

import pytest

from aspekto import taxonomy
from aspekto.errors import ValidationError
from aspekto.hierarchy import (
    GoldGeneralScorer,
    RuleScorer,
    TableScorer,
    inverse_frequency_weights,
    load_score_table,
    predict_flat,
    predict_hierarchical,
)
from aspekto.labels import LabelVector, enforce_hierarchy
from aspekto.reviews import Review

from conftest import random_consistent_vector

REVIEW = Review(id="r1", text="sample review text")


class CountingScorer:
    """Wraps a score table and counts invocations (laziness probe)."""

    def __init__(self, scores: dict[str, float]):
        self._scores = scores
        self.labels = tuple(scores)
        self.calls = 0

    def score(self, review):
        self.calls += 1
        return dict(self._scores)


def make_scorers(rng=None, scores=None):
    """Random or fixed scorers covering all 25 labels."""
    if scores is None:
        scores = {slug: rng.random() for slug in taxonomy.ALL_SLUGS}
    general = CountingScorer({g: scores[g] for g in taxonomy.GENERALS})
    specifics = {
        g: CountingScorer({s: scores[s] for s in taxonomy.specifics_of(g)})
        for g in taxonomy.GENERALS
    }
    return general, specifics, scores


class TestPredictFlat:
    def test_all_zero(self):
        general, specifics, _ = make_scorers(scores={s: 0.0 for s in taxonomy.ALL_SLUGS})
        prediction = predict_flat(REVIEW, general, specifics)
        assert prediction.vector == LabelVector.empty()
        assert prediction.inconsistent == ()

    def test_inconsistent_reported_raw_and_flagged(self):
        scores = {s: 0.0 for s in taxonomy.ALL_SLUGS}
        scores["PRODUCT"] = 0.9
        scores["DELIVERY.Timeliness"] = 0.8
        general, specifics, _ = make_scorers(scores=scores)
        prediction = predict_flat(REVIEW, general, specifics, threshold=0.5)
        assert prediction.vector.get("PRODUCT")
        assert prediction.vector.get("DELIVERY.Timeliness")
        assert not prediction.vector.is_consistent
        assert prediction.inconsistent == ("DELIVERY.Timeliness",)

    def test_score_at_threshold_fires(self):
        scores = {s: 0.0 for s in taxonomy.ALL_SLUGS}
        scores["PRICE"] = 0.5
        general, specifics, _ = make_scorers(scores=scores)
        prediction = predict_flat(REVIEW, general, specifics, threshold=0.5)
        assert prediction.vector.get("PRICE")

    def test_missing_scorer_rejected(self):
        general, specifics, _ = make_scorers(scores={s: 0.0 for s in taxonomy.ALL_SLUGS})
        del specifics["PRICE"]
        with pytest.raises(ValidationError):
            predict_flat(REVIEW, general, specifics)

    def test_invalid_score_rejected(self):
        scores = {s: 0.0 for s in taxonomy.ALL_SLUGS}
        scores["PRICE"] = 1.5
        general, specifics, _ = make_scorers(scores=scores)
        with pytest.raises(ValidationError):
            predict_flat(REVIEW, general, specifics)


class TestPredictHierarchical:
    def test_full_gating_invokes_no_specific_scorer(self):
        general, specifics, _ = make_scorers(scores={s: 0.0 for s in taxonomy.ALL_SLUGS})
        prediction = predict_hierarchical(REVIEW, general, specifics)
        assert prediction.vector == LabelVector.empty()
        assert all(s.calls == 0 for s in specifics.values())

    def test_partial_gating(self):
        scores = {s: 0.0 for s in taxonomy.ALL_SLUGS}
        scores["PRICE"] = 0.9
        scores["PRICE.Affordability"] = 0.9
        general, specifics, _ = make_scorers(scores=scores)
        prediction = predict_hierarchical(REVIEW, general, specifics)
        assert prediction.vector.true_slugs() == ("PRICE", "PRICE.Affordability")
        assert specifics["PRICE"].calls == 1
        for g in ("PRODUCT", "DELIVERY", "SERVICE"):
            assert specifics[g].calls == 0

    def test_equals_enforced_flat_when_no_gate_closes(self):
        rng = random.Random(21)
        scores = {s: rng.uniform(0.5, 1.0) for s in taxonomy.ALL_SLUGS}
        general1, specifics1, _ = make_scorers(scores=scores)
        general2, specifics2, _ = make_scorers(scores=scores)
        flat = predict_flat(REVIEW, general1, specifics1)
        hier = predict_hierarchical(REVIEW, general2, specifics2)
        assert hier.vector == enforce_hierarchy(flat.vector)


def check_hierarchy_properties(seed: int, configurations: int) -> None:
    """Randomized gating soundness + laziness + threshold monotonicity."""
    rng = random.Random(seed)
    for _ in range(configurations):
        _, _, scores = make_scorers(rng)
        threshold = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0, rng.random()])

        general_flat, specifics_flat, _ = make_scorers(scores=scores)
        general_hier, specifics_hier, _ = make_scorers(scores=scores)
        flat = predict_flat(REVIEW, general_flat, specifics_flat, threshold)
        hier = predict_hierarchical(REVIEW, general_hier, specifics_hier, threshold)

        # gating soundness: hierarchical == enforce_hierarchy of a flat
        # prediction whose gated-off specific scores are treated as 0
        masked = dict(scores)
        for gi, g in enumerate(taxonomy.GENERALS):
            if not hier.vector.general[gi]:
                for s in taxonomy.specifics_of(g):
                    masked[s] = 0.0
        general_masked, specifics_masked, _ = make_scorers(scores=masked)
        masked_flat = predict_flat(REVIEW, general_masked, specifics_masked, threshold)
        assert hier.vector == enforce_hierarchy(masked_flat.vector)
        assert hier.vector == enforce_hierarchy(flat.vector)
        assert hier.vector.is_consistent

        # laziness: gated-off scorers never invoked
        for gi, g in enumerate(taxonomy.GENERALS):
            expected = 1 if hier.vector.general[gi] else 0
            assert specifics_hier[g].calls == expected

        # threshold monotonicity: raising the threshold never adds a label
        higher = min(1.0, threshold + rng.random() * (1 - threshold) + 1e-9)
        general_hi, specifics_hi, _ = make_scorers(scores=scores)
        flat_hi = predict_flat(REVIEW, general_hi, specifics_hi, higher)
        assert set(flat_hi.vector.true_slugs()) <= set(flat.vector.true_slugs())
        general_hi2, specifics_hi2, _ = make_scorers(scores=scores)
        hier_hi = predict_hierarchical(REVIEW, general_hi2, specifics_hi2, higher)
        assert set(hier_hi.vector.true_slugs()) <= set(hier.vector.true_slugs())


class TestHierarchyProperties:
    def test_randomized_configurations(self):
        check_hierarchy_properties(seed=31337, configurations=250)


class TestScorers:
    def test_rule_scorer_hard_scores(self, rule_config):
        scorer = RuleScorer(rule_config)
        scores = scorer.score(Review(id="r", text="mura ang item"))
        assert scores["PRICE.Affordability"] == 1.0
        assert scores["PRODUCT"] == 0.0
        assert set(scores) == set(taxonomy.ALL_SLUGS)

    def test_table_scorer_roundtrip(self, tmp_path):
        rows = [
            {"review_id": "r1", **{s: 0.0 for s in taxonomy.ALL_SLUGS}, "PRICE": 0.9},
            {"review_id": "r2", **{s: 0.1 for s in taxonomy.ALL_SLUGS}},
        ]
        path = tmp_path / "scores.jsonl"
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        table = load_score_table(str(path))
        scorer = TableScorer(table, taxonomy.ALL_SLUGS)
        assert scorer.score(Review(id="r1", text="x"))["PRICE"] == 0.9
        with pytest.raises(ValidationError):
            scorer.score(Review(id="zzz", text="x"))

    def test_table_scorer_validates_range(self):
        with pytest.raises(ValidationError):
            TableScorer({"r1": {"PRICE": 1.7}}, ["PRICE"])

    def test_gold_general_scorer(self):
        gold = {"r1": LabelVector.from_slugs(["PRICE", "PRICE.Affordability"])}
        scorer = GoldGeneralScorer(gold)
        scores = scorer.score(Review(id="r1", text="x"))
        assert scores == {"PRODUCT": 0.0, "DELIVERY": 0.0, "PRICE": 1.0, "SERVICE": 0.0}


class TestInverseFrequencyWeights:
    def test_paper_prevalence_example(self):
        rng = random.Random(5)
        vectors = []
        for i in range(100):
            slugs = ["SERVICE", "SERVICE.General"] if i < 21 else ["PRODUCT"]
            vectors.append(LabelVector.from_slugs(slugs))
        weights = inverse_frequency_weights(vectors)
        assert weights.weights["SERVICE"] == pytest.approx(100 / 21, abs=1e-12)
        assert round(weights.weights["SERVICE"], 4) == 4.7619

    def test_omnipresent_label(self):
        vectors = [LabelVector.from_slugs(["PRICE"]) for _ in range(10)]
        weights = inverse_frequency_weights(vectors)
        assert weights.weights["PRICE"] == 1.0

    def test_zero_positive_clamped_and_flagged(self):
        vectors = [LabelVector.from_slugs(["PRICE"]) for _ in range(10)]
        weights = inverse_frequency_weights(vectors)
        assert weights.weights["SERVICE"] == 10.0
        assert "SERVICE" in weights.zero_positive
        assert "PRICE" not in weights.zero_positive

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValidationError):
            inverse_frequency_weights([])

    def test_weights_positive_and_finite(self):
        rng = random.Random(6)
        vectors = [random_consistent_vector(rng) for _ in range(40)]
        weights = inverse_frequency_weights(vectors)
        for value in weights.weights.values():
            assert 0 < value <= 40

import json
import random

import pytest

from aspekto.errors import ConfigError
from aspekto.labels import canonical_label_json
from aspekto.reviews import Review
from aspekto.rules import (
    apply_disambiguation,
    match_lexicon,
    normalize,
    parse_rule_config,
    tag_review,
)


def entry(pattern, targets, mode="word", entry_id=None):
    config = parse_rule_config(
        json.dumps(
            {
                "lexicon": [
                    {
                        "id": entry_id or f"lex-{pattern}",
                        "pattern": pattern,
                        "match_mode": mode,
                        "targets": targets,
                    }
                ]
            }
        )
    )
    return config.lexicon[0]


class TestNormalize:
    def test_case_folding(self):
        assert normalize("MURA!").text == "mura!"

    def test_repeat_collapse(self):
        assert normalize("muraaaa").text == "mura"

    def test_identity(self):
        assert normalize("bilis").text == "bilis"

    def test_two_repeats_kept(self):
        assert normalize("happy").text == "happy"

    def test_digits_not_collapsed(self):
        assert normalize("1000 pesos").text == "1000 pesos"

    def test_offset_map_recovers_original_range(self):
        norm = normalize("MURAAAA ang item")
        assert norm.text == "mura ang item"
        start, end = norm.original_span(0, 4)
        assert (start, end) == (0, 7)
        assert "MURAAAA ang item"[start:end] == "MURAAAA"

    def test_empty(self):
        assert normalize("").text == ""


class TestLexicon:
    def test_paper_example(self):
        review = Review(id="r", text="mura ang item")
        matches = match_lexicon(review, [entry("mura", ["PRICE.Affordability"])])
        assert len(matches) == 1
        m = matches[0]
        assert m.specific == "PRICE.Affordability"
        assert m.span.category == "PRICE"
        assert (m.span.start, m.span.end, m.span.surface) == (0, 4, "mura")

    def test_empty_text_no_matches(self):
        # empty corpus text is rejected upstream; a no-hit review yields []
        review = Review(id="r", text="walang tugma dito")
        assert match_lexicon(review, [entry("mura", ["PRICE.Affordability"])]) == []

    def test_word_boundary_semantics(self):
        review = Review(id="r", text="murang mura")
        matches = match_lexicon(review, [entry("mura", ["PRICE.Affordability"])])
        assert len(matches) == 1
        assert (matches[0].span.start, matches[0].span.end) == (7, 11)

    def test_multiple_targets_yield_multiple_matches(self):
        review = Review(id="r", text="sulit ito")
        matches = match_lexicon(
            review, [entry("sulit", ["PRICE.Value_for_Money", "PRICE.General"])]
        )
        assert [m.specific for m in matches] == ["PRICE.Value_for_Money", "PRICE.General"]

    def test_sorted_by_start_then_rule_order(self):
        review = Review(id="r", text="mura at sulit")
        entries = [
            entry("sulit", ["PRICE.Value_for_Money"]),
            entry("mura", ["PRICE.Affordability"]),
        ]
        matches = match_lexicon(review, entries)
        assert [m.specific for m in matches] == [
            "PRICE.Affordability",
            "PRICE.Value_for_Money",
        ]

    def test_match_on_normalized_recovers_original_span(self):
        review = Review(id="r", text="SOBRANG MURAAAA")
        matches = match_lexicon(review, [entry("mura", ["PRICE.Affordability"])])
        assert len(matches) == 1
        assert matches[0].span.surface == "MURAAAA"

    def test_regex_mode(self):
        review = Review(id="r", text="worth it naman")
        matches = match_lexicon(
            review, [entry(r"\bworth\s+it\b", ["PRICE.Value_for_Money"], mode="regex")]
        )
        assert len(matches) == 1
        assert matches[0].span.surface == "worth it"


class TestDisambiguation:
    def test_bilis_rule_paper_fixtures(self, rule_config):
        rules = [r for r in rule_config.disambiguation if r.id == "bilis"]
        assert rules, "shipped config must include the bilis rule"
        review = Review(id="r", text="bilis dumating")
        matches, _ = apply_disambiguation(review, rules)
        assert [m.specific for m in matches] == ["DELIVERY.Timeliness"]

        review = Review(id="r", text="bilis ng epekto")
        matches, _ = apply_disambiguation(review, rules)
        assert [m.specific for m in matches] == ["PRODUCT.Effectiveness"]

    def test_no_cue_no_default_yields_nothing(self, rule_config):
        rules = [r for r in rule_config.disambiguation if r.id == "bilis"]
        review = Review(id="r", text="ang bilis")
        matches, triggers = apply_disambiguation(review, rules)
        assert matches == []
        assert len(triggers) == 1  # the trigger span is still claimed

    def test_branch_order_is_priority(self):
        config = parse_rule_config(
            json.dumps(
                {
                    "disambiguation": [
                        {
                            "id": "demo",
                            "trigger": "bilis",
                            "window": 5,
                            "branches": [
                                {"cues": ["dumating"], "target": "DELIVERY.Timeliness"},
                                {"cues": ["dumating"], "target": "PRODUCT.Effectiveness"},
                            ],
                            "default_target": "none",
                        }
                    ]
                }
            )
        )
        review = Review(id="r", text="bilis dumating")
        matches, _ = apply_disambiguation(review, config.disambiguation)
        assert [m.specific for m in matches] == ["DELIVERY.Timeliness"]

    def test_window_limits_cue_search(self):
        config = parse_rule_config(
            json.dumps(
                {
                    "disambiguation": [
                        {
                            "id": "demo",
                            "trigger": "bilis",
                            "window": 2,
                            "branches": [
                                {"cues": ["dumating"], "target": "DELIVERY.Timeliness"},
                                {"cues": ["epekto"], "target": "PRODUCT.Effectiveness"},
                            ],
                            "default_target": "none",
                        }
                    ]
                }
            )
        )
        near = Review(id="r", text="bilis naman dumating")
        far = Review(id="r", text="bilis na naman po kasi dumating")
        assert apply_disambiguation(near, config.disambiguation)[0]
        assert apply_disambiguation(far, config.disambiguation)[0] == []

    def test_trigger_is_not_its_own_cue(self):
        config = parse_rule_config(
            json.dumps(
                {
                    "disambiguation": [
                        {
                            "id": "demo",
                            "trigger": "tagal",
                            "window": 3,
                            "branches": [
                                {"cues": ["\\w*tagal"], "target": "PRODUCT.Durability"},
                                {"cues": ["dumating"], "target": "DELIVERY.Timeliness"},
                            ],
                            "default_target": "none",
                        }
                    ]
                }
            )
        )
        # only the trigger word itself appears; the self-match must not count
        review = Review(id="r", text="ang tagal dumating")
        matches, _ = apply_disambiguation(review, config.disambiguation)
        assert [m.specific for m in matches] == ["DELIVERY.Timeliness"]


class TestTagReview:
    def test_price_fixture(self, rule_config):
        vector, matches = tag_review(Review(id="r", text="mura ang item"), rule_config)
        assert vector.true_slugs() == ("PRICE", "PRICE.Affordability")
        assert matches[0].rule_id == "lex-mura"

    def test_zero_matches(self, rule_config):
        vector, matches = tag_review(Review(id="r", text="wala dito kahit ano"), rule_config)
        assert vector.true_slugs() == ()
        assert matches == []

    def test_union_fixture(self, rule_config):
        vector, _ = tag_review(
            Review(id="r", text="mura at ang bilis dumating"), rule_config
        )
        assert set(vector.true_slugs()) == {
            "PRICE",
            "PRICE.Affordability",
            "DELIVERY",
            "DELIVERY.Timeliness",
        }

    def test_cross_aspect_contamination_fixture(self, rule_config):
        vector, _ = tag_review(
            Review(id="r", text="Blue order ko pero pink dumating."), rule_config
        )
        assert vector.get("DELIVERY.Correctness")
        assert not vector.get("PRODUCT.Correctness")

    def test_hierarchy_consistent_by_construction(self, rule_config, synthetic_corpus):
        for item in synthetic_corpus:
            vector, _ = tag_review(item.review, rule_config)
            assert vector.is_consistent

    def test_span_surfaces_are_original_slices(self, rule_config, synthetic_corpus):
        for item in synthetic_corpus:
            _, matches = tag_review(item.review, rule_config)
            for m in matches:
                assert m.span.matches_text(item.review.text)

    def test_match_category_is_parent_of_specific(self, rule_config, synthetic_corpus):
        from aspekto.taxonomy import parent_slug

        for item in synthetic_corpus:
            _, matches = tag_review(item.review, rule_config)
            for m in matches:
                assert m.span.category == parent_slug(m.specific)

    def test_disambiguation_overrides_lexicon_on_trigger_span(self):
        config = parse_rule_config(
            json.dumps(
                {
                    "lexicon": [
                        {"id": "lex-bilis", "pattern": "bilis", "targets": ["DELIVERY.Timeliness"]}
                    ],
                    "disambiguation": [
                        {
                            "id": "bilis",
                            "trigger": "bilis",
                            "window": 5,
                            "branches": [
                                {"cues": ["epekto"], "target": "PRODUCT.Effectiveness"},
                                {"cues": ["reply"], "target": "SERVICE.Responsiveness"},
                            ],
                            "default_target": "none",
                        }
                    ],
                }
            )
        )
        vector, matches = tag_review(Review(id="r", text="bilis ng epekto"), config)
        assert [m.specific for m in matches] == ["PRODUCT.Effectiveness"]
        assert not vector.get("DELIVERY.Timeliness")
        # trigger with no cue consumes the span entirely
        vector, matches = tag_review(Review(id="r", text="ang bilis naman"), config)
        assert matches == []
        assert vector.true_slugs() == ()

    def test_determinism(self, rule_config, synthetic_corpus):
        def run():
            out = []
            for item in synthetic_corpus:
                vector, matches = tag_review(item.review, rule_config)
                out.append(
                    canonical_label_json(vector)
                    + json.dumps(
                        [
                            [m.rule_id, m.specific, m.span.start, m.span.end]
                            for m in matches
                        ]
                    )
                )
            return "\n".join(out).encode("utf-8")

        first = run()
        for _ in range(10):
            assert run() == first

    def test_lexicon_growth_is_monotone(self, rule_config):
        rng = random.Random(7)
        texts = [
            "mura ang item at mabango",
            "maganda ang kulay pero late dumating",
            "legit ang seller, sulit ang presyo",
            "sira ang zipper pagdating",
        ]
        from aspekto.rules import RuleConfig

        grown = RuleConfig(
            lexicon=rule_config.lexicon + (entry("zipper", ["PRODUCT.General"]),),
            disambiguation=rule_config.disambiguation,
        )
        for text in texts:
            review = Review(id="r", text=text)
            _, before = tag_review(review, rule_config)
            _, after = tag_review(review, grown)
            before_keys = {(m.rule_id, m.specific, m.span.start, m.span.end) for m in before}
            after_keys = {(m.rule_id, m.specific, m.span.start, m.span.end) for m in after}
            assert before_keys <= after_keys


class TestConfigLoading:
    def test_unknown_target_reports_line(self, tmp_path):
        raw = (
            '{\n  "lexicon": [\n    {"id": "a", "pattern": "mura",'
            ' "targets": ["PRICE.Affordability"]},\n'
            '    {"id": "b", "pattern": "bilis",\n     "targets": ["DELIVERY.Speed"]}\n  ]\n}\n'
        )
        path = tmp_path / "rules.json"
        path.write_text(raw)
        from aspekto.rules import load_rules

        with pytest.raises(ConfigError) as exc:
            load_rules(str(path))
        message = str(exc.value)
        assert "DELIVERY.Speed" in message
        assert f"{path}:4" in message

    def test_bad_regex_rejected(self):
        with pytest.raises(ConfigError) as exc:
            parse_rule_config(
                '{"lexicon": [{"pattern": "(unclosed", "match_mode": "regex",'
                ' "targets": ["PRICE.General"]}]}'
            )
        assert "does not compile" in str(exc.value)

    def test_invalid_json_reports_line(self):
        with pytest.raises(ConfigError) as exc:
            parse_rule_config('{\n  "lexicon": [\n    {"pattern" "x"}\n  ]\n}')
        assert ":3:" in str(exc.value)

    def test_rule_needs_two_distinct_targets(self):
        with pytest.raises(ConfigError) as exc:
            parse_rule_config(
                json.dumps(
                    {
                        "disambiguation": [
                            {
                                "id": "one-target",
                                "trigger": "bilis",
                                "branches": [
                                    {"cues": ["dumating"], "target": "DELIVERY.Timeliness"}
                                ],
                                "default_target": "none",
                            }
                        ]
                    }
                )
            )
        assert "distinct targets" in str(exc.value)

    def test_shipped_config_loads_with_ten_rules(self, rule_config):
        assert len(rule_config.disambiguation) == 10
        assert {r.id for r in rule_config.disambiguation} >= {"bilis", "color-fulfillment"}
        assert len(rule_config.lexicon) >= 50

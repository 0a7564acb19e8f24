"""Command-line interface: thin wrappers over the library and service.

Exit codes: 2 for validation failures (bad input data, bad config), 3 for
provider failures; diagnostics go to stderr as one JSON object per line so
wrapping tools can parse them.
"""

from __future__ import annotations

import functools
import json
import sys
from typing import Optional

import click

from . import taxonomy
from .corpus import (
    SplitSpec,
    label_distribution,
    load_corpus,
    load_predictions,
    save_corpus,
    save_predictions,
    split as split_corpus,
)
from .errors import CorpusError, ProviderError, ValidationError
from .hierarchy import (
    GoldGeneralScorer,
    TableScorer,
    inverse_frequency_weights,
    load_score_table,
    predict_flat,
    predict_hierarchical,
)
from .labels import LabelVector, canonical_label_json
from .metrics import evaluate as evaluate_vectors
from .rules import default_rules, load_rules, tag_review


def _diag(kind: str, message: str, **extra) -> None:
    payload = {"error": kind, "message": message, **extra}
    click.echo(json.dumps(payload, ensure_ascii=False), err=True)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CorpusError as exc:
            _diag("corpus-validation", str(exc), lines=[e.to_dict() for e in exc.errors])
            sys.exit(2)
        except ValidationError as exc:
            _diag("validation", str(exc))
            sys.exit(2)
        except ProviderError as exc:
            _diag("provider", str(exc), attempts=exc.attempts)
            sys.exit(3)
        except FileNotFoundError as exc:
            _diag("validation", f"file not found: {exc.filename}")
            sys.exit(2)

    return wrapper


@click.group()
@click.version_option()
def cli():
    """Aspect identification and extraction for Taglish reviews."""


@cli.command("taxonomy")
def taxonomy_cmd():
    """Print the versioned taxonomy document as JSON."""
    click.echo(json.dumps(taxonomy.taxonomy_document(), indent=2))


@cli.command("tag")
@click.option("--rules", "rules_path", type=click.Path(), default=None, help="Rule config (default: shipped rules).")
@click.option("--scores", "scores_path", type=click.Path(), default=None, help="Score-table JSONL instead of rules.")
@click.option("--in", "in_path", required=True, type=click.Path(), help="Input corpus (JSONL).")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output predictions (JSONL).")
@click.option("--mode", type=click.Choice(["flat", "hierarchical"]), default="hierarchical", show_default=True, help="Prediction mode for --scores.")
@click.option("--threshold", type=float, default=0.5, show_default=True, help="Decision threshold for --scores.")
@click.option("--gate-with", type=click.Choice(["predicted", "gold"]), default="predicted", show_default=True, help="Stage-1 gate source for hierarchical --scores mode.")
@handle_errors
def tag_cmd(rules_path, scores_path, in_path, out_path, mode, threshold, gate_with):
    """Tag a corpus with the rule engine (or a precomputed score table)."""
    if rules_path and scores_path:
        raise ValidationError("--rules and --scores are mutually exclusive")
    corpus, _ = load_corpus(in_path, mode="strict")
    predictions: dict[str, Optional[LabelVector]] = {}
    if scores_path:
        table = load_score_table(scores_path)
        scorer = TableScorer(table, taxonomy.ALL_SLUGS)
        specific_scorers = {g: scorer for g in taxonomy.GENERALS}
        if gate_with == "gold":
            gold = corpus.gold_vectors()
            missing = [rid for rid in corpus.ids() if rid not in gold]
            if missing:
                raise ValidationError(f"--gate-with gold needs gold labels; missing for {missing[:5]}")
            general_scorer = GoldGeneralScorer(gold)
        else:
            general_scorer = scorer
        for item in corpus:
            if mode == "flat":
                prediction = predict_flat(item.review, general_scorer, specific_scorers, threshold)
            else:
                prediction = predict_hierarchical(item.review, general_scorer, specific_scorers, threshold)
            predictions[item.review.id] = prediction.vector
    else:
        config = load_rules(rules_path) if rules_path else default_rules()
        for item in corpus:
            vector, _ = tag_review(item.review, config)
            predictions[item.review.id] = vector
    save_predictions(predictions, out_path)
    click.echo(json.dumps({"tagged": len(predictions), "out": out_path}))


@cli.command("evaluate")
@click.option("--gold", "gold_path", required=True, type=click.Path(), help="Gold corpus (JSONL with labels).")
@click.option("--pred", "pred_path", required=True, type=click.Path(), help="Predictions (JSONL).")
@click.option("--scope", type=click.Choice(["general", "specific", "all"]), default="all", show_default=True)
@click.option("--report", "report_format", type=click.Choice(["json", "table"]), default="json", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write the report here instead of stdout.")
@handle_errors
def evaluate_cmd(gold_path, pred_path, scope, report_format, out_path):
    """Score a prediction file against a gold corpus."""
    corpus, _ = load_corpus(gold_path, mode="strict")
    predictions = load_predictions(pred_path)
    gold_vectors = []
    pred_vectors = []
    skipped = []
    for item in corpus:
        if item.gold is None:
            continue
        if item.review.id not in predictions:
            raise ValidationError(f"prediction file has no row for review {item.review.id!r}")
        predicted = predictions[item.review.id]
        if predicted is None:
            skipped.append(item.review.id)
            continue
        gold_vectors.append(item.gold)
        pred_vectors.append(predicted)
    if not gold_vectors:
        raise ValidationError("no reviews with both gold labels and predictions")
    if skipped:
        _diag("note", f"excluded {len(skipped)} unannotated review(s)", review_ids=skipped)
    report = evaluate_vectors(gold_vectors, pred_vectors, scope)
    rendered = report.to_json() if report_format == "json" else report.to_table()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(rendered + "\n")
        click.echo(json.dumps({"report": out_path}))
    else:
        click.echo(rendered)


@cli.command("annotate")
@click.option("--provider", "provider_path", type=click.Path(), default=None, help="Provider config JSON (default: offline mock over the rule engine).")
@click.option("--in", "in_path", required=True, type=click.Path(), help="Input corpus (JSONL).")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Output predictions (JSONL).")
@click.option("--few-shot", "few_shot", type=int, default=0, show_default=True, help="Number of gold-labeled reviews to embed as examples.")
@handle_errors
def annotate_cmd(provider_path, in_path, out_path, few_shot):
    """Run the LLM identification pipeline over a corpus."""
    from .llm.annotate import annotate_corpus
    from .llm.prompts import FewShotExample, PromptTemplate
    from .llm.provider import HttpChatProvider, MockChatProvider, ProviderConfig

    config = ProviderConfig.from_file(provider_path) if provider_path else ProviderConfig()
    corpus, _ = load_corpus(in_path, mode="strict")

    examples = []
    if few_shot:
        for item in corpus:
            if item.gold is not None:
                examples.append(
                    FewShotExample(review=item.review, labels=item.gold, spans=item.gold_spans or ())
                )
            if len(examples) >= few_shot:
                break
    template = PromptTemplate.default(examples=tuple(examples))

    if config.kind == "http":
        provider = HttpChatProvider(config.base_url, config.api_key_env, config.timeout)
    else:
        provider = _mock_provider(config, corpus)

    results = annotate_corpus(corpus.reviews(), template, provider, config)
    predictions = {r.review_id: r.vector for r in results}
    save_predictions(predictions, out_path)
    unannotated = [r.review_id for r in results if r.unannotated]
    summary = {
        "annotated": len(results) - len(unannotated),
        "unannotated": unannotated,
        "prompt_version": template.version,
        "out": out_path,
    }
    click.echo(json.dumps(summary, ensure_ascii=False))


def _mock_provider(config, corpus):
    """Deterministic offline responders for tests and demos."""
    from .llm.provider import MockChatProvider

    if config.mock_style == "echo-gold":
        by_text = {
            item.review.text: item.gold for item in corpus if item.gold is not None
        }

        def responder(request):
            text = request.messages[-1].content.removeprefix("Review: ").removesuffix("\nAnswer:")
            gold = by_text.get(text)
            if gold is None:
                return "{}"
            return canonical_label_json(gold)

    elif config.mock_style == "rules":
        rule_config = default_rules()
        from .reviews import Review

        def responder(request):
            text = request.messages[-1].content.removeprefix("Review: ").removesuffix("\nAnswer:")
            vector, _ = tag_review(Review(id="mock", text=text), rule_config)
            return canonical_label_json(vector)

    else:
        raise ValidationError(f"unknown mock_style: {config.mock_style!r}")
    return MockChatProvider(responder)


@cli.command("audit")
@click.option("--campaign", "campaign_path", required=True, type=click.Path(), help="Campaign JSONL (created if missing).")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--pred", "pred_path", required=True, type=click.Path(), help="LLM predictions under audit.")
@click.option("--sample", "sample_size", required=True, type=int)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--verdicts", "verdicts_path", type=click.Path(), default=None, help="JSON {review_id: true|false}; omit for an interactive session.")
@handle_errors
def audit_cmd(campaign_path, corpus_path, pred_path, sample_size, seed, verdicts_path):
    """Sample machine annotations for human inspection and record a round."""
    import os

    from .llm.campaign import (
        AnnotationCampaign,
        load_campaign,
        record_audit_round,
        sample_unaudited,
        save_campaign,
    )

    corpus, _ = load_corpus(corpus_path, mode="strict")
    predictions = load_predictions(pred_path)
    if os.path.exists(campaign_path):
        campaign = load_campaign(campaign_path)
    else:
        campaign = AnnotationCampaign(id=os.path.basename(campaign_path), corpus_ref=corpus_path)

    labeled_ids = [rid for rid in corpus.ids() if predictions.get(rid) is not None]
    sampled = sample_unaudited(campaign, labeled_ids, sample_size, seed)

    if verdicts_path:
        with open(verdicts_path, "r", encoding="utf-8") as fh:
            verdicts = {k: bool(v) for k, v in json.load(fh).items()}
    else:
        verdicts = {}
        for rid in sampled:
            item = corpus.get(rid)
            click.echo(f"\n[{rid}] {item.review.text}")
            click.echo(f"  LLM labels: {', '.join(predictions[rid].true_slugs()) or '(none)'}")
            verdicts[rid] = click.confirm("  correct?", default=True)

    llm_labels = {rid: list(predictions[rid].true_slugs()) for rid in sampled}
    campaign = record_audit_round(campaign, "cli-audit", seed, sampled, llm_labels, verdicts)
    save_campaign(campaign, campaign_path)
    latest = campaign.rounds[-1]
    click.echo(
        json.dumps(
            {"round": latest.index, "accuracy": latest.accuracy, "sampled": list(sampled)}
        )
    )


@cli.command("split")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--train-out", required=True, type=click.Path())
@click.option("--test-out", required=True, type=click.Path())
@click.option("--seed", type=int, required=True)
@click.option("--train-frac", type=float, default=0.8, show_default=True)
@click.option("--test-frac", type=float, default=0.2, show_default=True)
@click.option("--stratify-by", type=click.Choice(list(taxonomy.GENERALS)), default=None)
@handle_errors
def split_cmd(in_path, train_out, test_out, seed, train_frac, test_frac, stratify_by):
    """Deterministic train/test partition of a corpus."""
    corpus, _ = load_corpus(in_path, mode="strict")
    spec = SplitSpec(
        seed=seed,
        train_fraction=train_frac,
        test_fraction=test_frac,
        stratify_by=stratify_by,
    )
    train, test = split_corpus(corpus, spec)
    save_corpus(train, train_out)
    save_corpus(test, test_out)
    click.echo(json.dumps({"train": len(train), "test": len(test)}))


@cli.command("stats")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--weights/--no-weights", default=True, show_default=True, help="Include inverse-frequency class weights.")
@handle_errors
def stats_cmd(in_path, weights):
    """Label prevalence, co-occurrence and class weights for a gold corpus."""
    corpus, _ = load_corpus(in_path, mode="strict")
    distribution = label_distribution(corpus)
    payload = distribution.to_dict()
    if weights:
        vectors = [item.gold for item in corpus if item.gold is not None]
        payload["class_weights"] = inverse_frequency_weights(vectors).to_dict()
    click.echo(json.dumps(payload, indent=2))


@cli.command("validate")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["jsonl", "csv"]), default="jsonl", show_default=True)
def validate_cmd(in_path, fmt):
    """Validate a corpus file; emits a machine-readable error report."""
    try:
        corpus, errors = load_corpus(in_path, fmt=fmt, mode="lenient")
    except (ValidationError, FileNotFoundError) as exc:
        _diag("validation", str(exc))
        sys.exit(2)
    report = {
        "path": in_path,
        "valid_rows": len(corpus),
        "errors": [e.to_dict() for e in errors],
    }
    click.echo(json.dumps(report, indent=2))
    if errors:
        sys.exit(2)


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8674, show_default=True)
@click.option("--store", "store_dir", type=click.Path(), default="campaigns", show_default=True)
@click.option("--rules", "rules_path", type=click.Path(), default=None)
@click.option("--demo", is_flag=True, help="Seed a demo calibration campaign on startup.")
@handle_errors
def serve_cmd(host, port, store_dir, rules_path, demo):
    """Start the HTTP service backing the annotation workbench."""
    import uvicorn

    from .service.app import create_app

    app = create_app(store_dir=store_dir, rules_path=rules_path)
    if demo:
        from .service.demo import seed_demo_campaign

        seeded = seed_demo_campaign(app.state.store)
        if seeded:
            click.echo(json.dumps({"demo_campaign": seeded}))
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main():
    cli(prog_name="aspekto")


if __name__ == "__main__":
    main()

"""Prompt construction for aspect identification and span extraction.

Serialization is strictly deterministic: the same (review, template) pair
always produces byte-identical messages, and the template's version tag is
a fingerprint of its content, so any edit to the preamble, examples or
output instruction is visible in logs and campaign records.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .. import taxonomy
from ..errors import ValidationError
from ..labels import LabelVector, canonical_label_json
from ..reviews import AspectSpan, Review
from .provider import ChatMessage

IDENTIFICATION_INSTRUCTION = (
    "Answer with a single JSON object whose keys are exactly the label slugs "
    "listed above (all 25 of them) and whose values are JSON booleans. "
    "Mark a specific aspect true only when its general category is also true. "
    "Output no text other than the JSON object."
)

EXTRACTION_INSTRUCTION = (
    'Answer with a single JSON object of the form {"spans": [{"category": '
    '"<one of PRODUCT, DELIVERY, PRICE, SERVICE>", "text": "<exact substring '
    'copied from the review>"}]}. Copy each span verbatim from the review, '
    "with no paraphrasing. Output no text other than the JSON object."
)


def taxonomy_preamble() -> str:
    """Render the label definitions the model must annotate against."""
    doc = taxonomy.taxonomy_document()
    lines = [
        "You label Taglish (mixed Tagalog/English) e-commerce reviews with the "
        "aspects they discuss. Aspects form a two-level hierarchy of 4 general "
        "categories and 21 specific aspects:",
        "",
    ]
    for general in doc["generals"]:
        children = [s for s in doc["specifics"] if s["general"] == general["slug"]]
        lines.append(f"- {general['slug']}: " + ", ".join(c["slug"] for c in children))
    lines += [
        "",
        "A specific aspect implies its general category. Implicit mentions count: "
        '"affordable" discusses PRICE.Affordability even without the word "price".',
    ]
    return "\n".join(lines)


@dataclass(frozen=True)
class FewShotExample:
    review: Review
    labels: LabelVector
    spans: tuple[AspectSpan, ...] = ()

    def __post_init__(self):
        if not self.labels.is_consistent:
            bad = ", ".join(self.labels.inconsistent_specifics())
            raise ValidationError(f"few-shot example {self.review.id!r} is inconsistent: {bad}")
        for span in self.spans:
            if not span.matches_text(self.review.text):
                raise ValidationError(
                    f"few-shot example {self.review.id!r}: span does not match text"
                )


@dataclass(frozen=True)
class PromptTemplate:
    preamble: str
    examples: tuple[FewShotExample, ...] = ()
    output_instruction: str = IDENTIFICATION_INSTRUCTION
    label: str = "v1"

    @classmethod
    def default(cls, examples: tuple[FewShotExample, ...] = (), label: str = "v1") -> "PromptTemplate":
        return cls(preamble=taxonomy_preamble(), examples=examples, label=label)

    @property
    def version(self) -> str:
        """Content fingerprint; changes whenever any field changes."""
        blob = json.dumps(
            {
                "preamble": self.preamble,
                "examples": [
                    {
                        "text": e.review.text,
                        "labels": e.labels.as_map(),
                        "spans": [
                            {"category": s.category, "start": s.start, "end": s.end}
                            for s in e.spans
                        ],
                    }
                    for e in self.examples
                ],
                "instruction": self.output_instruction,
            },
            sort_keys=True,
            ensure_ascii=False,
        ).encode("utf-8")
        return f"{self.label}-{hashlib.sha256(blob).hexdigest()[:12]}"


def _example_block(example: FewShotExample, with_spans: bool) -> str:
    lines = [f"Review: {example.review.text}"]
    if with_spans:
        spans = [{"category": s.category, "text": s.surface} for s in example.spans]
        lines.append("Answer: " + json.dumps({"spans": spans}, ensure_ascii=False, separators=(",", ":")))
    else:
        lines.append("Answer: " + canonical_label_json(example.labels))
    return "\n".join(lines)


def build_identification_prompt(review: Review, template: PromptTemplate) -> tuple[ChatMessage, ...]:
    """Messages asking for the 25-key boolean object for one review."""
    parts = [template.preamble, "", template.output_instruction]
    if template.examples:
        parts += ["", "Examples:"]
        for example in template.examples:
            parts += ["", _example_block(example, with_spans=False)]
    system = "\n".join(parts)
    user = f"Review: {review.text}\nAnswer:"
    return (ChatMessage("system", system), ChatMessage("user", user))


def build_extraction_prompt(review: Review, template: PromptTemplate) -> tuple[ChatMessage, ...]:
    """Messages asking for exact aspect text spans for one review."""
    parts = [template.preamble, "", EXTRACTION_INSTRUCTION]
    examples_with_spans = [e for e in template.examples if e.spans]
    if examples_with_spans:
        parts += ["", "Examples:"]
        for example in examples_with_spans:
            parts += ["", _example_block(example, with_spans=True)]
    system = "\n".join(parts)
    user = f"Review: {review.text}\nAnswer:"
    return (ChatMessage("system", system), ChatMessage("user", user))

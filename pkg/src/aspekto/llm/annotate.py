"""The annotation runner: prompt, call, parse, repair, retry.

Each review gets at most ``max_attempts`` provider calls; a review whose
attempts all fail to parse is marked unannotated and reported -- never
silently defaulted to an empty vector.  Reviews are independent, so the
runner can fan out across a thread pool up to a configured parallelism.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from ..errors import ProviderError
from ..labels import LabelVector
from ..reviews import AspectSpan, Review
from .parsing import ParseFailure, ParsedLabels, align_spans, parse_boolean_output, parse_span_output
from .prompts import PromptTemplate, build_extraction_prompt, build_identification_prompt
from .provider import ChatProvider, ChatRequest, ProviderConfig

log = logging.getLogger(__name__)

DEFAULT_MAX_ATTEMPTS = 3


@dataclass(frozen=True)
class LlmResponse:
    raw: str
    parsed: Union[ParsedLabels, list[AspectSpan], ParseFailure]
    attempts: int


@dataclass(frozen=True)
class AnnotationResult:
    review_id: str
    response: LlmResponse
    prompt_version: str

    @property
    def vector(self) -> Optional[LabelVector]:
        if isinstance(self.response.parsed, ParsedLabels):
            return self.response.parsed.vector
        return None

    @property
    def unannotated(self) -> bool:
        return isinstance(self.response.parsed, ParseFailure)


def _request(messages, config: ProviderConfig) -> ChatRequest:
    return ChatRequest(
        model=config.model,
        messages=messages,
        temperature=config.temperature,
        max_tokens=config.max_tokens,
    )


def annotate_review(
    review: Review,
    template: PromptTemplate,
    provider: ChatProvider,
    config: ProviderConfig = ProviderConfig(),
) -> AnnotationResult:
    """Identify aspects for one review, retrying on parse failures."""
    messages = build_identification_prompt(review, template)
    request = _request(messages, config)
    raw = ""
    failure: Union[ParseFailure, None] = None
    for attempt in range(1, config.max_attempts + 1):
        try:
            raw = provider.complete(request)
        except ProviderError as exc:
            failure = ParseFailure(f"provider error: {exc}")
            log.warning("review %s attempt %d: %s", review.id, attempt, exc)
            continue
        parsed = parse_boolean_output(raw)
        if isinstance(parsed, ParsedLabels):
            if parsed.repaired:
                log.info(
                    "review %s: hierarchy repair cleared %s",
                    review.id,
                    ", ".join(parsed.repaired),
                )
            return AnnotationResult(
                review.id, LlmResponse(raw, parsed, attempt), template.version
            )
        failure = parsed
        log.warning("review %s attempt %d: %s", review.id, attempt, parsed.reason)
    return AnnotationResult(
        review.id,
        LlmResponse(raw, failure or ParseFailure("no attempts made"), config.max_attempts),
        template.version,
    )


def extract_spans(
    review: Review,
    template: PromptTemplate,
    provider: ChatProvider,
    config: ProviderConfig = ProviderConfig(),
) -> AnnotationResult:
    """Extract aspect spans for one review; unlocatable strings are dropped."""
    messages = build_extraction_prompt(review, template)
    request = _request(messages, config)
    raw = ""
    failure: Union[ParseFailure, None] = None
    for attempt in range(1, config.max_attempts + 1):
        try:
            raw = provider.complete(request)
        except ProviderError as exc:
            failure = ParseFailure(f"provider error: {exc}")
            log.warning("review %s attempt %d: %s", review.id, attempt, exc)
            continue
        parsed = parse_span_output(raw)
        if isinstance(parsed, ParseFailure):
            failure = parsed
            log.warning("review %s attempt %d: %s", review.id, attempt, parsed.reason)
            continue
        spans, _dropped = align_spans(review, parsed)
        return AnnotationResult(
            review.id, LlmResponse(raw, spans, attempt), template.version
        )
    return AnnotationResult(
        review.id,
        LlmResponse(raw, failure or ParseFailure("no attempts made"), config.max_attempts),
        template.version,
    )


def annotate_corpus(
    reviews: Sequence[Review],
    template: PromptTemplate,
    provider: ChatProvider,
    config: ProviderConfig = ProviderConfig(),
) -> list[AnnotationResult]:
    """Annotate many reviews, preserving corpus order in the results."""
    if config.parallelism <= 1:
        return [annotate_review(r, template, provider, config) for r in reviews]
    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
        return list(
            pool.map(lambda r: annotate_review(r, template, provider, config), reviews)
        )

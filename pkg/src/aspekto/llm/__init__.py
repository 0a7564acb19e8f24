"""LLM-assisted annotation: providers, prompts, output parsing, campaigns."""

from .provider import ChatMessage, ChatRequest, HttpChatProvider, MockChatProvider, request_json
from .prompts import FewShotExample, PromptTemplate, build_extraction_prompt, build_identification_prompt
from .parsing import ParseFailure, ParsedLabels, align_spans, parse_boolean_output, parse_span_output
from .annotate import AnnotationResult, LlmResponse, annotate_corpus, annotate_review
from .campaign import AnnotationCampaign, AuditRound, load_campaign, record_audit_round, sample_unaudited, save_campaign

__all__ = [
    "AnnotationCampaign",
    "AnnotationResult",
    "AuditRound",
    "ChatMessage",
    "ChatRequest",
    "FewShotExample",
    "HttpChatProvider",
    "LlmResponse",
    "MockChatProvider",
    "ParseFailure",
    "ParsedLabels",
    "PromptTemplate",
    "align_spans",
    "annotate_corpus",
    "annotate_review",
    "build_extraction_prompt",
    "build_identification_prompt",
    "load_campaign",
    "parse_boolean_output",
    "parse_span_output",
    "record_audit_round",
    "request_json",
    "sample_unaudited",
    "save_campaign",
]

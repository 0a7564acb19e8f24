"""Provider-agnostic chat-completion client.

One interface (model, messages, temperature, max tokens) with two
implementations: an HTTP client speaking the common ``/chat/completions``
JSON wire format, and a deterministic in-process mock so the whole
annotation pipeline runs offline in tests.  Temperature defaults to 0 --
annotation wants reproducibility.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Protocol

import httpx

from ..errors import ConfigError, ProviderError

DEFAULT_API_KEY_ENV = "ASPEKTO_API_KEY"


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_tokens: int = 1024


def request_json(request: ChatRequest) -> str:
    """Canonical request serialization; byte-stable for identical requests."""
    payload = {
        "model": request.model,
        "messages": [{"role": m.role, "content": m.content} for m in request.messages],
        "temperature": request.temperature,
        "max_tokens": request.max_tokens,
    }
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


class ChatProvider(Protocol):
    def complete(self, request: ChatRequest) -> str: ...


class HttpChatProvider:
    """POSTs OpenAI-style chat-completion JSON to ``{base_url}/chat/completions``.

    The API key is read from an environment variable, never from config
    files.  A hosted Gemini-compatible gateway is just one configuration of
    this client.
    """

    def __init__(
        self,
        base_url: str,
        api_key_env: str = DEFAULT_API_KEY_ENV,
        timeout: float = 30.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.timeout = timeout

    def complete(self, request: ChatRequest) -> str:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        try:
            response = httpx.post(
                f"{self.base_url}/chat/completions",
                content=request_json(request),
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            body = response.json()
            return body["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"chat completion failed: {exc}") from exc


class MockChatProvider:
    """Deterministic offline provider driven by a responder callable."""

    def __init__(self, responder: Callable[[ChatRequest], str]):
        self.responder = responder
        self.requests: list[ChatRequest] = []

    def complete(self, request: ChatRequest) -> str:
        self.requests.append(request)
        return self.responder(request)


@dataclass(frozen=True)
class ProviderConfig:
    """Runtime provider settings, loadable from a JSON config file."""

    kind: str = "mock"  # "http" | "mock"
    base_url: str = ""
    model: str = "mock-annotator"
    temperature: float = 0.0
    max_tokens: int = 1024
    max_attempts: int = 3
    parallelism: int = 1
    timeout: float = 30.0
    api_key_env: str = DEFAULT_API_KEY_ENV
    mock_style: str = "rules"  # responder for kind=mock: "rules" | "echo-gold"

    @classmethod
    def from_file(cls, path: str) -> "ProviderConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{path}: unknown provider option(s): {sorted(unknown)}")
        config = cls(**data)
        if config.kind not in ("http", "mock"):
            raise ConfigError(f"{path}: kind must be 'http' or 'mock', got {config.kind!r}")
        if config.kind == "http" and not config.base_url:
            raise ConfigError(f"{path}: http provider requires base_url")
        if config.max_attempts < 1 or config.parallelism < 1:
            raise ConfigError(f"{path}: max_attempts and parallelism must be >= 1")
        return config

"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad input data or configuration (CLI exit code 2)."""


class HierarchyError(ValidationError):
    """A label assignment violates the specific-implies-general invariant."""


class ConfigError(ValidationError):
    """A rule or provider config file failed validation."""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class CorpusError(ValidationError):
    """A corpus file failed validation; carries per-line errors."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__(
            "; ".join(f"line {e.line}: {e.message}" for e in self.errors)
        )


class ProviderError(RuntimeError):
    """An LLM provider call failed after exhausting retries (exit code 3)."""

    def __init__(self, message: str, attempts: int = 1):
        self.attempts = attempts
        super().__init__(message)

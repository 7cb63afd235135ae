"""A minimal language-model client: one prompt in, one text reply out.

Transports are pluggable.  :class:`HttpTransport` posts JSON to an
endpoint; :class:`MockTransport` answers from a canned file keyed by the
SHA-256 of the prompt, so tests never touch the network.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import httpx

log = logging.getLogger(__name__)

MOCK_PREFIX = "mock:"


class LlmError(RuntimeError):
    pass


@dataclass(frozen=True)
class LlmClientConfig:
    endpoint: str = "http://localhost:8080/v1/generate"
    model: str = "default"
    api_key_env: str = "JSDEOB_LLM_API_KEY"
    timeout_secs: float = 60.0
    max_retries: int = 2
    max_concurrency: int = 4
    max_prompt_chars: int = 400_000  # no chunking: longer inputs fail detection

    def __post_init__(self) -> None:
        if self.timeout_secs <= 0:
            raise ValueError("timeout_secs must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be at least 1")


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class Transport(Protocol):
    def send(self, prompt: str, config: LlmClientConfig) -> str: ...


class HttpTransport:
    """POST ``{"model", "prompt"}``; the reply is a JSON ``text`` field or the raw body."""

    def send(self, prompt: str, config: LlmClientConfig) -> str:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(config.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        resp = httpx.post(
            config.endpoint,
            json={"model": config.model, "prompt": prompt},
            headers=headers,
            timeout=config.timeout_secs,
        )
        resp.raise_for_status()
        try:
            data = resp.json()
        except ValueError:
            return resp.text
        if isinstance(data, dict) and isinstance(data.get("text"), str):
            return data["text"]
        return resp.text


@dataclass
class MockTransport:
    """Canned replies: ``responses`` by prompt digest, else ``default``."""

    responses: dict[str, str]
    default: str | None = None
    calls: int = 0

    @classmethod
    def from_file(cls, path: str | Path) -> MockTransport:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(dict(data.get("responses", {})), data.get("default"))

    def send(self, prompt: str, config: LlmClientConfig) -> str:
        self.calls += 1
        reply = self.responses.get(prompt_digest(prompt), self.default)
        if reply is None:
            raise LlmError("mock transport has no reply for this prompt")
        return reply


_SEMAPHORES: dict[int, threading.BoundedSemaphore] = {}
_SEMAPHORE_LOCK = threading.Lock()


def _semaphore(cap: int) -> threading.BoundedSemaphore:
    with _SEMAPHORE_LOCK:
        sem = _SEMAPHORES.get(cap)
        if sem is None:
            sem = _SEMAPHORES[cap] = threading.BoundedSemaphore(cap)
        return sem


class LlmClient:
    def __init__(self, config: LlmClientConfig, transport: Transport | None = None):
        self.config = config
        if transport is None:
            if config.endpoint.startswith(MOCK_PREFIX):
                transport = MockTransport.from_file(config.endpoint[len(MOCK_PREFIX):])
            else:
                transport = HttpTransport()
        self.transport = transport

    def complete(self, prompt: str) -> str:
        if len(prompt) > self.config.max_prompt_chars:
            raise LlmError(f"prompt of {len(prompt)} chars exceeds the context limit")
        last: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            try:
                with _semaphore(self.config.max_concurrency):
                    return self.transport.send(prompt, self.config)
            except (httpx.HTTPError, LlmError) as exc:
                last = exc
                log.warning("llm request failed (attempt %d): %s", attempt + 1, exc)
                if attempt < self.config.max_retries:
                    time.sleep(min(0.5 * 2**attempt, 4.0) if not isinstance(self.transport, MockTransport) else 0)
        raise LlmError(f"llm request failed after {self.config.max_retries + 1} attempts: {last}")

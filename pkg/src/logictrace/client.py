"""OpenAI-compatible chat-completion client with an append-only response cache.

Every evaluation request is one single-turn chat completion (one user
message) at temperature 0. Responses are cached under a content hash of
(model name, prompt text); retries repeat the identical request and never
alter the prompt.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import requests

logger = logging.getLogger(__name__)

_MAX_ATTEMPTS = 3
_RETRY_STATUSES = {429, 500, 502, 503, 504}


class EndpointError(RuntimeError):
    def __init__(self, status: int | None, message: str):
        super().__init__(message)
        self.status = status


class CacheCorruption(RuntimeError):
    """A non-final cache line failed to parse; truncated tails are tolerated."""


@dataclass
class ModelEndpointConfig:
    base_url: str = ""
    model_name: str = "offline-oracle"
    api_key_env: str = "OPENAI_API_KEY"
    temperature: float = 0.0
    max_output_tokens: int = 2048
    request_timeout: float = 60.0
    max_parallel: int = 4

    def to_dict(self) -> dict:
        return {
            "base_url": self.base_url,
            "model_name": self.model_name,
            "api_key_env": self.api_key_env,
            "temperature": self.temperature,
            "max_output_tokens": self.max_output_tokens,
            "request_timeout": self.request_timeout,
            "max_parallel": self.max_parallel,
        }


def prompt_cache_key(model_name: str, prompt_text: str) -> str:
    digest = hashlib.sha256()
    digest.update(model_name.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(prompt_text.encode("utf-8"))
    return digest.hexdigest()


class ResponseCache:
    """Append-only JSONL store: {key, model, created_at, response_text}.

    Append-only keeps interrupted runs resumable: a crash can at worst leave
    one truncated final line, which is dropped on load.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[str, str] = {}
        if self.path.exists():
            lines = self.path.read_text(encoding="utf-8").splitlines()
            for line_no, line in enumerate(lines):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    self._entries[record["key"]] = record["response_text"]
                except (ValueError, KeyError, TypeError) as exc:
                    if line_no == len(lines) - 1:
                        logger.warning("dropping truncated cache tail in %s", self.path)
                        continue
                    raise CacheCorruption(f"{self.path}:{line_no + 1}: {exc}") from None

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: str) -> str | None:
        return self._entries.get(key)

    def put(self, key: str, model: str, response_text: str) -> None:
        record = {
            "key": key,
            "model": model,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "response_text": response_text,
        }
        with self._lock:
            self._entries[key] = response_text
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(record) + "\n")


def query_model(config: ModelEndpointConfig, prompt, cache: ResponseCache | None = None) -> str:
    """One single-turn chat completion, served from cache when possible."""
    text = getattr(prompt, "text", prompt)
    key = prompt_cache_key(config.model_name, text)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit

    if not config.base_url:
        raise EndpointError(None, "no endpoint configured and prompt not in cache")
    url = config.base_url.rstrip("/") + "/chat/completions"
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(config.api_key_env, "")
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    body = {
        "model": config.model_name,
        "messages": [{"role": "user", "content": text}],
        "temperature": config.temperature,
        "max_tokens": config.max_output_tokens,
    }

    last_status: int | None = None
    last_error = ""
    for attempt in range(_MAX_ATTEMPTS):
        if attempt:
            time.sleep(min(2.0**attempt, 8.0))
        try:
            response = requests.post(
                url, headers=headers, json=body, timeout=config.request_timeout
            )
        except requests.RequestException as exc:
            last_status, last_error = None, str(exc)
            logger.warning("request failed (attempt %d): %s", attempt + 1, exc)
            continue
        if response.status_code == 200:
            payload = response.json()
            output = payload["choices"][0]["message"]["content"] or ""
            if cache is not None:
                cache.put(key, config.model_name, output)
            return output
        last_status, last_error = response.status_code, response.text[:500]
        if response.status_code not in _RETRY_STATUSES:
            break
        logger.warning("endpoint returned %d (attempt %d)", response.status_code, attempt + 1)
    raise EndpointError(last_status, f"endpoint failed ({last_status}): {last_error}")

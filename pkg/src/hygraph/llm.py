"""Chat-completion gateway with content-addressed record/replay caching."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from collections import deque
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Protocol

from .tokens import DEFAULT_TOKENIZER, count_tokens

logger = logging.getLogger(__name__)

PURPOSES = (
    "entity_extract",
    "header_select",
    "entity_map",
    "reader",
    "summarize_table",
    "summarize_text",
    "baseline",
    "ner",
)
MODES = ("live", "replay", "record")

ENDPOINT_ENV = "HYGRAPH_LLM_ENDPOINT"
API_KEY_ENV = "HYGRAPH_LLM_API_KEY"
CACHE_DIR_ENV = "HYGRAPH_CACHE_DIR"


@dataclass(frozen=True)
class LlmRequest:
    model: str
    prompt: str
    temperature: float = 0.0
    max_output_tokens: int = 512
    purpose_tag: str = "reader"

    def __post_init__(self):
        if self.purpose_tag not in PURPOSES:
            raise ValueError(f"unknown purpose_tag {self.purpose_tag!r}")

    @property
    def cache_key(self) -> str:
        payload = json.dumps(
            {"model": self.model, "prompt": self.prompt, "temperature": float(self.temperature)},
            sort_keys=True,
            ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class LlmExchange:
    request: LlmRequest
    response_text: str
    input_tokens: int
    output_tokens: int
    cache_key: str

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "LlmExchange":
        return cls(
            request=LlmRequest(**d["request"]),
            response_text=d["response_text"],
            input_tokens=int(d["input_tokens"]),
            output_tokens=int(d["output_tokens"]),
            cache_key=d["cache_key"],
        )


class ReplayMiss(LookupError):
    def __init__(self, cache_key: str, purpose_tag: str):
        super().__init__(f"replay miss for {purpose_tag} request (cache_key={cache_key})")
        self.cache_key = cache_key
        self.purpose_tag = purpose_tag


class TransportError(RuntimeError):
    def __init__(self, message: str, attempts: int = 1, retriable: bool = True):
        super().__init__(f"{message} (after {attempts} attempt(s))")
        self.attempts = attempts
        self.retriable = retriable


@dataclass
class Completion:
    text: str
    input_tokens: Optional[int] = None
    output_tokens: Optional[int] = None


class Transport(Protocol):
    def send(self, req: LlmRequest) -> Completion: ...


class HttpTransport:
    """POSTs to an OpenAI-style ``/v1/chat/completions`` endpoint."""

    def __init__(self, endpoint: str | None = None, api_key: str | None = None, timeout: float = 120.0):
        import httpx

        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV)
        self.api_key = api_key or os.environ.get(API_KEY_ENV)
        if not self.endpoint:
            raise TransportError(f"no endpoint configured (set {ENDPOINT_ENV})", retriable=False)
        if not self.endpoint.rstrip("/").endswith("/chat/completions"):
            self.endpoint = self.endpoint.rstrip("/") + "/v1/chat/completions"
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        self._client = httpx.Client(timeout=timeout, headers=headers)
        self._httpx = httpx

    def send(self, req: LlmRequest) -> Completion:
        body = {
            "model": req.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "max_tokens": req.max_output_tokens,
        }
        try:
            resp = self._client.post(self.endpoint, json=body)
        except self._httpx.HTTPError as e:
            raise TransportError(f"request failed: {e}") from e
        if resp.status_code >= 500 or resp.status_code == 429:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        if resp.status_code >= 400:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}", retriable=False)
        data = resp.json()
        usage = data.get("usage") or {}
        return Completion(
            text=data["choices"][0]["message"]["content"] or "",
            input_tokens=usage.get("prompt_tokens"),
            output_tokens=usage.get("completion_tokens"),
        )


class ExchangeCache:
    """``<root>/<key[:2]>/<key>.json`` files, written atomically."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> LlmExchange | None:
        p = self.path(key)
        if not p.exists():
            return None
        return LlmExchange.from_dict(json.loads(p.read_text(encoding="utf-8")))

    def put(self, ex: LlmExchange) -> None:
        p = self.path(ex.cache_key)
        p.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(ex.to_dict(), f, ensure_ascii=False, indent=1, sort_keys=True)
            f.write("\n")
        os.replace(tmp, p)

    def __contains__(self, key: str) -> bool:
        return self.path(key).exists()


class RateLimiter:
    """At most ``rpm`` acquisitions in any 60 s window."""

    def __init__(self, rpm: int | None, clock: Callable[[], float] = time.monotonic, sleep=time.sleep):
        self.rpm = rpm
        self._clock = clock
        self._sleep = sleep
        self._stamps: deque[float] = deque()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        if not self.rpm:
            return
        while True:
            with self._lock:
                now = self._clock()
                while self._stamps and now - self._stamps[0] >= 60.0:
                    self._stamps.popleft()
                if len(self._stamps) < self.rpm:
                    self._stamps.append(now)
                    return
                wait = 60.0 - (now - self._stamps[0])
            self._sleep(max(wait, 0.01))


@dataclass
class LlmGateway:
    """Uniform ``complete`` over live, record and replay modes.

    ``transport`` is only touched in live and record mode; it is created
    lazily from the environment when not injected.
    """

    mode: str = "replay"
    cache_dir: str | Path | None = None
    transport: Optional[Transport] = None
    tokenizer_id: str = DEFAULT_TOKENIZER
    max_attempts: int = 3
    backoff: float = 1.0
    max_in_flight: int = 4
    rpm: Optional[int] = None
    sleep: Callable[[float], None] = time.sleep
    temperature: Optional[float] = None  # overrides every request's temperature when set
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown gateway mode {self.mode!r}")
        if self.cache_dir is None:
            self.cache_dir = os.environ.get(CACHE_DIR_ENV)
        self.cache = ExchangeCache(self.cache_dir) if self.cache_dir else None
        if self.mode in ("replay", "record") and self.cache is None:
            raise ValueError(f"{self.mode} mode needs a cache directory")
        self._slots = threading.BoundedSemaphore(self.max_in_flight)
        self._limiter = RateLimiter(self.rpm, sleep=self.sleep)

    def _transport(self) -> Transport:
        with self._lock:
            if self.transport is None:
                self.transport = HttpTransport()
            return self.transport

    def _send_with_retries(self, req: LlmRequest) -> Completion:
        transport = self._transport()
        for attempt in range(1, self.max_attempts + 1):
            self._limiter.acquire()
            with self._slots:
                try:
                    return transport.send(req)
                except TransportError as e:
                    if not e.retriable or attempt == self.max_attempts:
                        raise TransportError(str(e).split(" (after")[0], attempt, e.retriable) from e
                    logger.warning("LLM call failed (attempt %d/%d): %s", attempt, self.max_attempts, e)
            self.sleep(self.backoff * 2 ** (attempt - 1))
        raise AssertionError("unreachable")

    def complete(self, req: LlmRequest, mode: str | None = None) -> LlmExchange:
        mode = mode or self.mode
        if self.temperature is not None and req.temperature != self.temperature:
            req = replace(req, temperature=self.temperature)
        key = req.cache_key
        if mode == "replay":
            ex = self.cache.get(key)
            if ex is None:
                raise ReplayMiss(key, req.purpose_tag)
            return ex
        out = self._send_with_retries(req)
        ex = LlmExchange(
            request=req,
            response_text=out.text,
            input_tokens=out.input_tokens if out.input_tokens is not None else count_tokens(req.prompt, self.tokenizer_id),
            output_tokens=out.output_tokens if out.output_tokens is not None else count_tokens(out.text, self.tokenizer_id),
            cache_key=key,
        )
        if mode == "record":
            self.cache.put(ex)
        return ex

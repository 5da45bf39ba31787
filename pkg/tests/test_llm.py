import json
import threading

import httpx
import pytest

from hygraph.llm import (
    ExchangeCache,
    HttpTransport,
    LlmExchange,
    LlmGateway,
    LlmRequest,
    RateLimiter,
    ReplayMiss,
    TransportError,
)
from hygraph.tokens import count_tokens

from helpers import CountingTransport, FlakyTransport


def req(prompt="hi", **kw):
    return LlmRequest(model="m", prompt=prompt, **kw)


def test_cache_key_covers_model_prompt_temperature_only():
    a = req(purpose_tag="reader", max_output_tokens=5)
    b = req(purpose_tag="baseline", max_output_tokens=99)
    assert a.cache_key == b.cache_key
    assert a.cache_key != req(temperature=0.5).cache_key
    assert a.cache_key != req("other").cache_key
    assert a.cache_key != LlmRequest(model="n", prompt="hi").cache_key
    assert len(a.cache_key) == 64


def test_unknown_purpose():
    with pytest.raises(ValueError):
        LlmRequest(model="m", prompt="p", purpose_tag="chat")


def test_record_writes_layout_and_replay_reads(tmp_path):
    t = CountingTransport(lambda r: "answer")
    rec = LlmGateway(mode="record", cache_dir=tmp_path, transport=t)
    ex = rec.complete(req())
    path = tmp_path / ex.cache_key[:2] / f"{ex.cache_key}.json"
    assert path.is_file()
    assert LlmExchange.from_dict(json.loads(path.read_text())) == ex
    assert ex.input_tokens == count_tokens("hi") and ex.output_tokens == count_tokens("answer")

    t2 = CountingTransport()
    rep = LlmGateway(mode="replay", cache_dir=tmp_path, transport=t2)
    assert rep.complete(req()) == ex
    assert rep.complete(req()) == ex
    assert t2.calls == 0


def test_replay_miss_carries_key(tmp_path):
    gw = LlmGateway(mode="replay", cache_dir=tmp_path)
    r = req("never recorded", purpose_tag="entity_extract")
    with pytest.raises(ReplayMiss) as e:
        gw.complete(r)
    assert e.value.cache_key == r.cache_key
    assert e.value.purpose_tag == "entity_extract"


def test_replay_needs_cache_dir(monkeypatch):
    monkeypatch.delenv("HYGRAPH_CACHE_DIR", raising=False)
    with pytest.raises(ValueError):
        LlmGateway(mode="replay")


def test_provider_usage_wins_over_estimate(tmp_path):
    from hygraph.llm import Completion

    gw = LlmGateway(mode="live", transport=CountingTransport(lambda r: Completion("x", 123, 4)))
    ex = gw.complete(req())
    assert (ex.input_tokens, ex.output_tokens) == (123, 4)


def test_live_does_not_write_cache(tmp_path):
    gw = LlmGateway(mode="live", cache_dir=tmp_path, transport=CountingTransport())
    gw.complete(req())
    assert not any(tmp_path.iterdir())


def test_temperature_override_changes_key(tmp_path):
    gw = LlmGateway(mode="record", cache_dir=tmp_path, transport=CountingTransport(), temperature=0.7)
    ex = gw.complete(req())
    assert ex.request.temperature == 0.7
    assert ex.cache_key == req(temperature=0.7).cache_key


def test_retries_with_backoff():
    sleeps = []
    t = FlakyTransport(2)
    gw = LlmGateway(mode="live", transport=t, sleep=sleeps.append, backoff=1.0)
    ex = gw.complete(req())
    assert ex.response_text == "fine" and t.calls == 3
    assert sleeps == [1.0, 2.0]


def test_retries_exhausted():
    gw = LlmGateway(mode="live", transport=FlakyTransport(5), sleep=lambda s: None)
    with pytest.raises(TransportError) as e:
        gw.complete(req())
    assert e.value.attempts == 3


def test_non_retriable_fails_fast():
    t = FlakyTransport(5, retriable=False)
    gw = LlmGateway(mode="live", transport=t, sleep=lambda s: None)
    with pytest.raises(TransportError):
        gw.complete(req())
    assert t.calls == 1


def test_atomic_put_leaves_no_temp_files(tmp_path):
    cache = ExchangeCache(tmp_path)
    r = req()
    ex = LlmExchange(r, "x", 1, 1, r.cache_key)
    for _ in range(3):
        cache.put(ex)
    files = list(tmp_path.rglob("*"))
    assert [f.name for f in files if f.is_file()] == [f"{r.cache_key}.json"]
    assert r.cache_key in cache


def test_concurrent_record(tmp_path):
    gw = LlmGateway(mode="record", cache_dir=tmp_path, transport=CountingTransport(lambda r: r.prompt.upper()),
                    max_in_flight=2)
    out = {}

    def work(i):
        out[i] = gw.complete(req(f"p{i % 5}"))

    threads = [threading.Thread(target=work, args=(i,)) for i in range(20)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert {out[i].response_text for i in range(20)} == {f"P{i}" for i in range(5)}
    assert len(list(tmp_path.rglob("*.json"))) == 5


def test_rate_limiter_waits():
    now = [0.0]
    slept = []

    def sleep(s):
        slept.append(s)
        now[0] += s

    lim = RateLimiter(2, clock=lambda: now[0], sleep=sleep)
    lim.acquire()
    lim.acquire()
    lim.acquire()
    assert slept and now[0] >= 60.0


def _http(handler):
    t = HttpTransport(endpoint="http://llm.test")
    t._client = httpx.Client(transport=httpx.MockTransport(handler))
    return t


def test_http_transport_wire_format():
    seen = {}

    def handler(request):
        seen["url"] = str(request.url)
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json={
            "choices": [{"message": {"content": "Final Answer: British"}}],
            "usage": {"prompt_tokens": 11, "completion_tokens": 3},
        })

    out = _http(handler).send(req("Q", max_output_tokens=32))
    assert seen["url"] == "http://llm.test/v1/chat/completions"
    assert seen["body"] == {"model": "m", "messages": [{"role": "user", "content": "Q"}], "temperature": 0.0, "max_tokens": 32}
    assert (out.text, out.input_tokens, out.output_tokens) == ("Final Answer: British", 11, 3)


@pytest.mark.parametrize("status, retriable", [(500, True), (503, True), (429, True), (400, False), (401, False)])
def test_http_status_classification(status, retriable):
    t = _http(lambda request: httpx.Response(status, text="nope"))
    with pytest.raises(TransportError) as e:
        t.send(req())
    assert e.value.retriable is retriable


def test_http_needs_endpoint(monkeypatch):
    monkeypatch.delenv("HYGRAPH_LLM_ENDPOINT", raising=False)
    with pytest.raises(TransportError):
        HttpTransport()

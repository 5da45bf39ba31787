"""Named-entity extraction from linked passages.

``rule_ner`` is the deterministic default: dates, numbers and maximal runs of
capitalized words. ``llm_ner`` and ``external_ner`` delegate to a model.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from .corpus import Document, normalize_text
from .parsing import ParseError, parse_labeled_list
from .templates import render


class NerUnavailable(RuntimeError):
    pass


@dataclass(frozen=True)
class DocEntity:
    surface: str
    normalized: str
    source_doc_id: str
    span: Optional[tuple[int, int]] = None


_MONTHS = (
    "January|February|March|April|May|June|July|August|September|October|November|December"
    "|Jan|Feb|Mar|Apr|Jun|Jul|Aug|Sep|Sept|Oct|Nov|Dec"
)
_DATE = re.compile(
    rf"\b(?:\d{{1,2}}\s+(?:{_MONTHS})\.?,?\s+\d{{3,4}}"
    rf"|(?:{_MONTHS})\.?\s+\d{{1,2}},?\s+\d{{3,4}}"
    rf"|(?:{_MONTHS})\s+\d{{4}})\b"
)
_NUMBER = re.compile(r"(?<![\w.,])[-+]?\d+(?:[.,:]\d+)*(?![\w])")
# a capitalized word, optionally hyphenated / possessive / with internal dots (e.g. "Jr.")
_CAP = r"(?:[A-Z][\w'’.-]*|[A-Z])"
_CONNECT = r"(?:of|de|da|del|der|di|du|la|le|van|von|y|bin|al)"
_SPAN = re.compile(rf"\b{_CAP}(?:\s+(?:{_CONNECT}\s+)?{_CAP})*")

_STOP = {
    "a", "an", "the", "he", "she", "it", "they", "we", "i", "you", "his", "her", "its", "their",
    "this", "that", "these", "those", "in", "on", "at", "by", "for", "from", "with", "as", "of",
    "to", "after", "before", "during", "since", "until", "while", "when", "where", "which", "who",
    "there", "here", "and", "but", "or", "if", "however", "although", "also", "then", "thus",
    "following", "born", "is", "was", "are", "were", "be", "has", "had", "have", "not", "no",
    "one", "both", "all", "some", "many", "most", "other", "another", "such", "what",
}


def _trim_span(text: str, start: int, end: int):
    """Drop leading stopwords and trailing punctuation from a candidate span."""
    words = list(re.finditer(r"\S+", text[start:end]))
    while words and words[0].group().lower().strip(".,") in _STOP:
        words.pop(0)
    if not words:
        return None
    s = start + words[0].start()
    e = start + words[-1].end()
    while e > s and text[e - 1] in ".,'’-":
        e -= 1
    return (s, e) if e > s else None


def rule_entities(text: str) -> list[tuple[str, int, int]]:
    """Candidate entity spans (surface, start, end) in text order."""
    taken = [False] * len(text)
    found = []

    def claim(s, e):
        if any(taken[s:e]):
            return False
        for i in range(s, e):
            taken[i] = True
        found.append((text[s:e], s, e))
        return True

    for m in _DATE.finditer(text):
        claim(m.start(), m.end())
    for m in _SPAN.finditer(text):
        span = _trim_span(text, m.start(), m.end())
        if span:
            claim(*span)
    for m in _NUMBER.finditer(text):
        claim(m.start(), m.end())
    found.sort(key=lambda t: t[1])
    return found


def _dedupe(doc_id: str, items) -> list[DocEntity]:
    seen, out = set(), []
    for surface, span in items:
        norm = normalize_text(surface)
        if norm and norm not in seen:
            seen.add(norm)
            out.append(DocEntity(surface, norm, doc_id, span))
    return out


class RuleNer:
    name = "rule_ner"

    def __call__(self, doc: Document) -> list[DocEntity]:
        return _dedupe(doc.doc_id, ((s, (a, b)) for s, a, b in rule_entities(doc.text)))


class LlmNer:
    """Asks a chat model for the passage's entities via the gateway."""

    name = "llm_ner"

    def __init__(self, gw, model: str = "gpt-3.5-turbo-1106"):
        self.gw = gw
        self.model = model

    def __call__(self, doc: Document) -> list[DocEntity]:
        from .llm import LlmRequest

        ex = self.gw.complete(LlmRequest(model=self.model, prompt=render("ner", text=doc.text), purpose_tag="ner"))
        try:
            names = parse_labeled_list(ex.response_text, "Entities")
        except ParseError:
            return []
        items = []
        for name in names:
            i = doc.text.find(name)
            items.append((name, (i, i + len(name)) if i >= 0 else None))
        return _dedupe(doc.doc_id, items)


class ExternalNer:
    """POST ``{"text": ...}`` -> ``{"entities": [{"text", "start", "end"}]}``."""

    name = "external_ner"

    def __init__(self, endpoint: str, post: Callable | None = None, timeout: float = 30.0):
        self.endpoint = endpoint
        if post is None:
            import httpx

            client = httpx.Client(timeout=timeout)

            def post(url, payload):
                try:
                    r = client.post(url, json=payload)
                    r.raise_for_status()
                except httpx.HTTPError as e:
                    raise NerUnavailable(f"external_ner unavailable at {url}: {e}") from e
                return r.json()

        self._post = post

    def __call__(self, doc: Document) -> list[DocEntity]:
        data = self._post(self.endpoint, {"text": doc.text})
        items = []
        for ent in data.get("entities", []):
            span = (ent["start"], ent["end"]) if "start" in ent and "end" in ent else None
            items.append((ent["text"], span))
        return _dedupe(doc.doc_id, items)


def make_ner(provider: str, gw=None, endpoint: str | None = None, model: str = "gpt-3.5-turbo-1106"):
    if provider == "rule_ner":
        return RuleNer()
    if provider == "llm_ner":
        if gw is None:
            raise NerUnavailable("llm_ner needs a gateway")
        return LlmNer(gw, model)
    if provider == "external_ner":
        if not endpoint:
            raise NerUnavailable("external_ner needs an endpoint")
        return ExternalNer(endpoint)
    raise NerUnavailable(f"unknown NER provider {provider!r}")


def extract_doc_entities(doc: Document, provider="rule_ner") -> list[DocEntity]:
    """Entities of one document, deduplicated on normalized form."""
    if not doc.text.strip():
        raise ValueError(f"document {doc.doc_id} has no text")
    ner = make_ner(provider) if isinstance(provider, str) else provider
    return ner(doc)

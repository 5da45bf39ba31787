"""Three-call question analysis: entities, relevant headers, entity-header map."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .corpus import TableTextInstance, normalize_text
from .llm import LlmExchange, LlmGateway, LlmRequest
from .parsing import ParseError, parse_labeled_list, parse_mapping
from .templates import render

logger = logging.getLogger(__name__)

OTHERS = "Others"


class DegenerateAnalysis(ValueError):
    """The model produced no usable question entities."""


@dataclass
class QuestionAnalysis:
    entities: list[str]
    relevant_headers: list[str]
    entity_header_map: dict[str, list[str]]
    exchanges: list[LlmExchange] = field(default_factory=list, compare=False, repr=False)


def _dedupe(items):
    seen, out = set(), []
    for x in items:
        key = normalize_text(x)
        if key and key not in seen:
            seen.add(key)
            out.append(x)
    return out


def _fmt(items) -> str:
    return json.dumps(list(items), ensure_ascii=False)


def _ask(gw: LlmGateway, model: str, prompt: str, purpose: str, log: list | None) -> str:
    ex = gw.complete(LlmRequest(model=model, prompt=prompt, purpose_tag=purpose))
    if log is not None:
        log.append(ex)
    return ex.response_text


def extract_entities(
    question: str,
    table_name: str,
    headers,
    gw: LlmGateway,
    model: str = "gpt-3.5-turbo-1106",
    log: list | None = None,
) -> list[str]:
    if not question.strip():
        raise ValueError("empty question")
    prompt = render("entity_extract", question=question, table_id=table_name, table_headers=_fmt(headers))
    raw = _ask(gw, model, prompt, "entity_extract", log)
    entities = _dedupe(parse_labeled_list(raw, "Entities"))
    if not entities:
        raise DegenerateAnalysis(f"no entities extracted for question {question!r}")
    return entities


def select_headers(
    question: str,
    table_name: str,
    headers,
    entities,
    gw: LlmGateway,
    model: str = "gpt-3.5-turbo-1106",
    log: list | None = None,
) -> list[str]:
    """Relevant headers in table order; all headers when none survive filtering."""
    if not entities:
        raise ValueError("select_headers needs at least one entity")
    prompt = render(
        "header_select",
        question=question,
        table_id=table_name,
        table_headers=_fmt(headers),
        entities=_fmt(entities),
    )
    raw = _ask(gw, model, prompt, "header_select", log)
    wanted = {normalize_text(h) for h in parse_labeled_list(raw, "Relevant headers")}
    picked = [h for h in headers if normalize_text(h) in wanted]
    return picked or list(headers)


def map_entities(
    question: str,
    table_name: str,
    entities,
    relevant_headers,
    gw: LlmGateway,
    headers=(),
    model: str = "gpt-3.5-turbo-1106",
    log: list | None = None,
) -> dict[str, list[str]]:
    """Total map entity -> headers; unknown headers and omitted entities become Others."""
    if not entities or not relevant_headers:
        raise ValueError("map_entities needs entities and relevant headers")
    prompt = render(
        "entity_map",
        question=question,
        table_id=table_name,
        entities=_fmt(entities),
        relevant_headers=_fmt(relevant_headers),
    )
    raw = _ask(gw, model, prompt, "entity_map", log)
    parsed = {normalize_text(k): v for k, v in parse_mapping(raw).items()}
    canonical = {normalize_text(h): h for h in list(headers) + list(relevant_headers)}
    out: dict[str, list[str]] = {}
    for ent in entities:
        targets = []
        for h in parsed.get(normalize_text(ent), []):
            h = canonical.get(normalize_text(h), OTHERS)
            if h not in targets:
                targets.append(h)
        out[ent] = targets or [OTHERS]
    return out


def analyze(
    instance: TableTextInstance,
    gw: LlmGateway,
    model: str = "gpt-3.5-turbo-1106",
) -> QuestionAnalysis:
    """Run all three calls; parse failures degrade rather than raise.

    A failed entity call yields an analysis with no entities (the pipeline
    then uses the full-context fallback); failed header or mapping calls
    fall back to all headers and an all-Others map respectively.
    """
    table = instance.table
    log: list[LlmExchange] = []
    try:
        entities = extract_entities(instance.question, table.name, table.headers, gw, model, log)
    except (ParseError, DegenerateAnalysis) as e:
        logger.warning("%s: entity extraction unusable: %s", instance.question_id, e)
        return QuestionAnalysis([], list(table.headers), {}, log)
    try:
        relevant = select_headers(instance.question, table.name, table.headers, entities, gw, model, log)
    except ParseError as e:
        logger.warning("%s: header selection unparseable, using all headers: %s", instance.question_id, e)
        relevant = list(table.headers)
    try:
        mapping = map_entities(
            instance.question, table.name, entities, relevant, gw, headers=table.headers, model=model, log=log
        )
    except ParseError as e:
        logger.warning("%s: entity mapping unparseable, mapping all to Others: %s", instance.question_id, e)
        mapping = {e_: [OTHERS] for e_ in entities}
    return QuestionAnalysis(entities, relevant, mapping, log)

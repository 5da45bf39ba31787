"""Reader loop over hop-wise contexts, the flat ablation, and the baselines."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .corpus import Document, Table, TableTextInstance, normalize_text
from .graph import CELL, HybridGraph
from .llm import LlmExchange, LlmGateway, LlmRequest
from .parsing import parse_list
from .templates import render
from .tokens import DEFAULT_TOKENIZER, count_tokens
from .traversal import FULL, HopDictionary

logger = logging.getLogger(__name__)

BASELINE_MODES = ("base", "full_context", "summarized_text", "summarized_both", "complete_graph")

HopLevel = Union[int, str]


@dataclass
class ReaderContext:
    hop_level: HopLevel
    headers: list[str]
    rows: list[list[str]]
    passages: list[tuple[str, str]]
    token_estimate: int = 0
    row_indices: list[int] = field(default_factory=list)

    @property
    def table_data(self) -> str:
        return linearize(self.headers, self.rows)

    @property
    def passage_text(self) -> str:
        return format_passages(self.passages)


@dataclass
class ReaderOutcome:
    answer: Optional[str]  # None means the reader never committed to an answer
    relevant_passages: list[str]
    hop_answered: Optional[HopLevel]
    exchanges: list[LlmExchange] = field(default_factory=list)
    fallback: bool = False


def _cell_text(s: str) -> str:
    return " ".join(s.split()).replace("|", "/")


def linearize(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Markdown pipe table with a header row."""
    lines = ["| " + " | ".join(_cell_text(h) for h in headers) + " |"]
    lines.append("|" + "|".join(" --- " for _ in headers) + "|")
    for row in rows:
        lines.append("| " + " | ".join(_cell_text(c) for c in row) + " |")
    return "\n".join(lines)


def format_passages(passages: Sequence[tuple[str, str]]) -> str:
    if not passages:
        return "[]"
    return "\n\n".join(f"{title}: {text}" for title, text in passages)


def full_table(table: Table) -> tuple[list[str], list[list[str]]]:
    return list(table.headers), [[c.text for c in row] for row in table.rows]


def all_passages(instance: TableTextInstance) -> list[tuple[str, str]]:
    return [(d.title, d.text) for _, d in sorted(instance.documents.items())]


def _resolve_passages(names: Sequence[str], docs: Sequence[Document]) -> set[str]:
    """doc_ids named by the model: normalized title equality, else containment."""
    def norm(s):
        return normalize_text(s.replace("_", " "))

    out = set()
    for name in names:
        key = norm(name)
        if not key:
            continue
        exact = [d.doc_id for d in docs if norm(d.title) == key]
        if exact:
            out.update(exact)
            continue
        loose = [d.doc_id for d in docs if key in norm(d.title) or norm(d.title) in key]
        if loose:
            out.update(loose)
        else:
            logger.warning("relevant passage %r matches no linked document", name)
    return out


def build_hop_context(
    hopdict: HopDictionary,
    k: int,
    carried_passages: Sequence[str],
    instance: TableTextInstance,
    tokenizer_id: str = DEFAULT_TOKENIZER,
) -> ReaderContext:
    """Context for hop ``k``: every row holding a cell reached within ``k`` hops.

    Passages are the documents linked from reached cells. Documents first
    reached at this hop are always included; documents from earlier hops are
    kept only if the previous reader call named them (no names, no filter).
    """
    if not 1 <= k <= hopdict.max_hops:
        raise ValueError(f"hop {k} outside 1..{hopdict.max_hops}")
    table = instance.table
    header_idx = [table.header_index(h) for h in hopdict.sub_table_headers]
    rows: set[int] = set()
    new_docs: set[str] = set()
    old_docs: set[str] = set()
    for n in hopdict.nodes_within(k):
        if n.kind != CELL:
            continue
        r, h = n.cell_position
        rows.add(r)
        bucket = new_docs if hopdict.distances[n] == k and k > 1 else old_docs
        bucket.update(table.cell(r, h).linked_doc_ids)
    old_docs -= new_docs
    if carried_passages and k > 1:
        keep = _resolve_passages(carried_passages, [instance.documents[d] for d in sorted(old_docs)])
        old_docs &= keep
    doc_ids = sorted(old_docs | new_docs)
    ordered = sorted(rows)
    ctx = ReaderContext(
        hop_level=k,
        headers=list(hopdict.sub_table_headers),
        rows=[[table.cell(r, h).text for h in header_idx] for r in ordered],
        passages=[(instance.documents[d].title, instance.documents[d].text) for d in doc_ids],
        row_indices=ordered,
    )
    ctx.token_estimate = count_tokens(ctx.table_data + "\n" + ctx.passage_text, tokenizer_id)
    return ctx


def full_context(instance: TableTextInstance, tokenizer_id: str = DEFAULT_TOKENIZER) -> ReaderContext:
    headers, rows = full_table(instance.table)
    ctx = ReaderContext(FULL, headers, rows, all_passages(instance), row_indices=list(range(len(rows))))
    ctx.token_estimate = count_tokens(ctx.table_data + "\n" + ctx.passage_text, tokenizer_id)
    return ctx


_FINAL = re.compile(r"final\s+answer\s*:\s*(.*)", re.IGNORECASE)


def is_none_answer(payload: str) -> bool:
    return re.sub(r"[^\w]", "", payload).lower() == "none"


def parse_reader_response(text: str) -> tuple[Optional[str], list[str], bool]:
    """Return (answer or None, relevant passages, parsed_ok)."""
    m = _FINAL.search(text)
    if not m:
        return None, [], False
    answer = m.group(1).strip()
    if not answer:
        tail = text[m.end():].splitlines()
        answer = next((l.strip() for l in tail if l.strip() and not l.lower().startswith("relevant passages")), "")
    if answer.startswith("<") and answer.endswith(">"):
        answer = answer[1:-1].strip()
    if not answer or is_none_answer(answer):
        rp = re.search(r"relevant\s+passages\s*:\s*(\[[^\]]*\]?)", text, re.IGNORECASE)
        return None, parse_list(rp.group(1)) if rp else [], True
    return answer, [], True


def _call_reader(gw, model, template, ctx_table, ctx_passages, question, purpose="reader"):
    prompt = render(template, table_data=ctx_table, passages=ctx_passages, question=question)
    return gw.complete(LlmRequest(model=model, prompt=prompt, purpose_tag=purpose))


def _read(gw, model, ctx: ReaderContext, question: str, exchanges: list):
    ex = _call_reader(gw, model, "reader_hopwise", ctx.table_data, ctx.passage_text, question)
    exchanges.append(ex)
    answer, relevant, ok = parse_reader_response(ex.response_text)
    if not ok:
        logger.warning("unparseable reader response at hop %s; treating as None", ctx.hop_level)
    return answer, relevant


def answer_full(instance, gw: LlmGateway, model: str, tokenizer_id=DEFAULT_TOKENIZER, exchanges=None, fallback=True):
    exchanges = [] if exchanges is None else exchanges
    answer, relevant = _read(gw, model, full_context(instance, tokenizer_id), instance.question, exchanges)
    return ReaderOutcome(answer, relevant, FULL, exchanges, fallback=fallback)


def answer_hopwise(
    instance: TableTextInstance,
    hopdict: Optional[HopDictionary],
    gw: LlmGateway,
    max_hops: int = 3,
    model: str = "gpt-4-1106-preview",
    tokenizer_id: str = DEFAULT_TOKENIZER,
) -> ReaderOutcome:
    """Widen the context one hop at a time until the reader commits.

    Hops that add no new path are skipped; after ``max_hops`` the whole
    table and every passage are sent.
    """
    if hopdict is None or not hopdict.seeds:
        return answer_full(instance, gw, model, tokenizer_id)
    exchanges: list[LlmExchange] = []
    carried: list[str] = []
    for k in range(1, min(max_hops, hopdict.max_hops) + 1):
        if k > 1 and not hopdict.hops.get(k):
            continue
        ctx = build_hop_context(hopdict, k, carried, instance, tokenizer_id)
        answer, relevant = _read(gw, model, ctx, instance.question, exchanges)
        if answer is not None:
            return ReaderOutcome(answer, [], k, exchanges)
        carried = relevant
    return answer_full(instance, gw, model, tokenizer_id, exchanges, fallback=False)


def answer_no_hopwise(
    instance: TableTextInstance,
    hopdict: Optional[HopDictionary],
    gw: LlmGateway,
    model: str = "gpt-4-1106-preview",
    tokenizer_id: str = DEFAULT_TOKENIZER,
) -> ReaderOutcome:
    """One call over everything the traversal reached."""
    if hopdict is None or not hopdict.seeds:
        return answer_full(instance, gw, model, tokenizer_id)
    ctx = build_hop_context(hopdict, hopdict.max_hops, [], instance, tokenizer_id)
    exchanges: list[LlmExchange] = []
    answer, relevant = _read(gw, model, ctx, instance.question, exchanges)
    return ReaderOutcome(answer, relevant, hopdict.max_hops, exchanges)


def _baseline_answer(text: str) -> Optional[str]:
    m = _FINAL.search(text)
    ans = (m.group(1) if m else text).strip()
    if not ans or is_none_answer(ans):
        return None
    return ans


def serialize_graph(g: HybridGraph) -> str:
    """One ``from | relation | to`` line per edge of the unpruned graph."""
    lines = []
    for a, b, kind in g.edges():
        if kind == "mention":
            doc, ent = (a, b) if a.kind == "document" else (b, a)
            lines.append(f"{g.nodes[doc].label} | mentions | {g.nodes[ent].label}")
        else:
            rel = g.nodes[b].header if b.kind == CELL else "entity"
            lines.append(f"{g.label(a)} | {rel} | {g.nodes[b].label}")
    return "\n".join(lines)


def answer_baseline(
    instance: TableTextInstance,
    mode: str,
    gw: LlmGateway,
    model: str = "gpt-4-1106-preview",
    summary_model: str = "gpt-3.5-turbo-1106",
    graph: Optional[HybridGraph] = None,
) -> ReaderOutcome:
    if mode not in BASELINE_MODES:
        raise ValueError(f"unknown baseline mode {mode!r}")
    exchanges: list[LlmExchange] = []
    if mode == "base":
        prompt = render("base", question=instance.question)
        ex = gw.complete(LlmRequest(model=model, prompt=prompt, purpose_tag="baseline"))
        exchanges.append(ex)
        return ReaderOutcome(_baseline_answer(ex.response_text), [], FULL, exchanges)

    headers, rows = full_table(instance.table)
    table_data = linearize(headers, rows)
    passages = all_passages(instance)
    template = "reader_baseline"
    if mode in ("summarized_text", "summarized_both"):
        summaries = []
        for title, text in passages:
            ex = gw.complete(
                LlmRequest(model=summary_model, prompt=render("summarize_text", text=text), purpose_tag="summarize_text")
            )
            exchanges.append(ex)
            summaries.append((title, ex.response_text.strip()))
        passages = summaries
    if mode == "summarized_both":
        ex = gw.complete(
            LlmRequest(model=summary_model, prompt=render("summarize_table", table=table_data), purpose_tag="summarize_table")
        )
        exchanges.append(ex)
        table_data = ex.response_text.strip()
    if mode == "complete_graph":
        if graph is None:
            raise ValueError("complete_graph mode needs the assembled hybrid graph")
        table_data = serialize_graph(graph)
        template = "reader_hopwise"
    ex = _call_reader(gw, model, template, table_data, format_passages(passages), instance.question, "baseline")
    exchanges.append(ex)
    if template == "reader_hopwise":
        answer, _, _ = parse_reader_response(ex.response_text)
    else:
        answer = _baseline_answer(ex.response_text)
    return ReaderOutcome(answer, [], FULL, exchanges)

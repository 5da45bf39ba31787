"""Tables, linked passages and questions: the data model and its loaders.

Three on-disk layouts are understood:

* ``native``   JSON Lines, one instance per line (see :func:`instance_to_dict`).
* ``hybridqa`` the released Hybrid-QA directory (``released_data/`` plus
  ``WikiTables-WithLinks/tables_tok`` and ``request_tok``).
* ``ottqa``    an OTT-QA dev file whose records already carry the retrieved
  table and retrieved passages.
"""

from __future__ import annotations

import json
import random
import re
import unicodedata
import urllib.parse
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

_WS = re.compile(r"\s+")


class CorpusError(ValueError):
    """Raised when a source record violates the data model."""


def normalize_text(s: str) -> str:
    """NFC, lowercase, trim and collapse internal whitespace."""
    s = unicodedata.normalize("NFC", s)
    return _WS.sub(" ", s.lower()).strip()


@dataclass(frozen=True)
class Cell:
    row_index: int
    header_index: int
    text: str
    linked_doc_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class Table:
    table_id: str
    name: str
    headers: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]

    def __post_init__(self):
        seen = set()
        for h in self.headers:
            key = normalize_text(h)
            if key in seen:
                raise CorpusError(f"duplicate header {h!r} in table {self.table_id}")
            seen.add(key)
        for i, row in enumerate(self.rows):
            if len(row) != len(self.headers):
                raise CorpusError(
                    f"row arity mismatch in table {self.table_id}: row {i} has "
                    f"{len(row)} cells for {len(self.headers)} headers"
                )

    def header_index(self, header: str) -> int:
        """Index of ``header``, matched case-insensitively."""
        key = normalize_text(header)
        for i, h in enumerate(self.headers):
            if normalize_text(h) == key:
                return i
        raise KeyError(header)

    def cell(self, row_index: int, header_index: int) -> Cell:
        return self.rows[row_index][header_index]

    def column(self, header_index: int) -> list[Cell]:
        return [row[header_index] for row in self.rows]

    def linked_doc_ids(self) -> set[str]:
        return {d for row in self.rows for c in row for d in c.linked_doc_ids}


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    text: str


@dataclass(frozen=True)
class TableTextInstance:
    question_id: str
    question: str
    table: Table
    documents: dict[str, Document] = field(hash=False)
    gold_answers: tuple[str, ...] = ()

    def __post_init__(self):
        missing = sorted(self.table.linked_doc_ids() - set(self.documents))
        if missing:
            raise CorpusError(
                f"dangling link in {self.question_id}: unresolved doc ids {missing}"
            )


# ---------------------------------------------------------------------------
# native format


def instance_to_dict(inst: TableTextInstance) -> dict[str, Any]:
    """Serialize an instance to the native JSON record."""
    return {
        "question_id": inst.question_id,
        "question": inst.question,
        "table": {
            "table_id": inst.table.table_id,
            "name": inst.table.name,
            "headers": list(inst.table.headers),
            "rows": [
                [{"text": c.text, "linked_doc_ids": list(c.linked_doc_ids)} for c in row]
                for row in inst.table.rows
            ],
        },
        "documents": {
            d.doc_id: {"doc_id": d.doc_id, "title": d.title, "text": d.text}
            for d in inst.documents.values()
        },
        "gold_answers": list(inst.gold_answers),
    }


def _require(rec: dict, key: str, qid: str, where: str = "record"):
    if key not in rec:
        raise CorpusError(f"malformed record {qid}: missing field {where}.{key}")
    return rec[key]


def instance_from_dict(rec: dict[str, Any]) -> TableTextInstance:
    qid = str(rec.get("question_id", "<unknown>"))
    question = _require(rec, "question", qid)
    t = _require(rec, "table", qid)
    headers = tuple(_require(t, "headers", qid, "table"))
    raw_rows = _require(t, "rows", qid, "table")
    rows = []
    for r, raw_row in enumerate(raw_rows):
        if len(raw_row) != len(headers):
            raise CorpusError(
                f"row arity mismatch in {qid}: row {r} has {len(raw_row)} cells "
                f"for {len(headers)} headers"
            )
        cells = []
        for h, raw in enumerate(raw_row):
            if isinstance(raw, str):
                text, links = raw, []
            else:
                if "text" not in raw:
                    raise CorpusError(f"malformed record {qid}: missing field table.rows[{r}][{h}].text")
                text = raw["text"]
                links = raw.get("linked_doc_ids", raw.get("links", []))
            cells.append(Cell(r, h, str(text), tuple(links)))
        rows.append(tuple(cells))
    docs = {}
    for key, d in _require(rec, "documents", qid).items():
        doc_id = d.get("doc_id", key)
        text = d.get("text", "")
        if not text:
            raise CorpusError(f"malformed record {qid}: empty documents[{key}].text")
        docs[doc_id] = Document(doc_id, d.get("title", doc_id), text)
    golds = rec.get("gold_answers", rec.get("answers", []))
    if isinstance(golds, str):
        golds = [golds]
    try:
        table = Table(
            table_id=str(t.get("table_id", qid)),
            name=t.get("name", ""),
            headers=headers,
            rows=tuple(rows),
        )
    except CorpusError as e:
        raise CorpusError(f"malformed record {qid}: {e}") from None
    return TableTextInstance(qid, question, table, docs, tuple(golds))


def dump_corpus(instances: Iterable[TableTextInstance], path: str | Path) -> None:
    """Write instances as native JSON Lines."""
    with open(path, "w", encoding="utf-8") as f:
        for inst in instances:
            f.write(json.dumps(instance_to_dict(inst), ensure_ascii=False) + "\n")


def _load_native(path: Path) -> list[TableTextInstance]:
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusError(f"{path}:{lineno}: invalid JSON ({e})") from None
            out.append(instance_from_dict(rec))
    return out


# ---------------------------------------------------------------------------
# Hybrid-QA / OTT-QA adapters


def _title_from_url(url: str) -> str:
    name = url.rsplit("/wiki/", 1)[-1]
    return urllib.parse.unquote(name).replace("_", " ")


class _DocRegistry:
    """Assigns doc ids (normalized titles, numeric suffix on collision)."""

    def __init__(self):
        self.docs: dict[str, Document] = {}
        self._by_source: dict[str, str] = {}

    def add(self, source_key: str, title: str, text: str) -> str:
        if source_key in self._by_source:
            return self._by_source[source_key]
        base = normalize_text(title) or "doc"
        doc_id, n = base, 1
        while doc_id in self.docs:
            n += 1
            doc_id = f"{base}-{n}"
        self.docs[doc_id] = Document(doc_id, title, text)
        self._by_source[source_key] = doc_id
        return doc_id

    def resolve(self, source_key: str) -> str | None:
        return self._by_source.get(source_key)


def _build_tok_table(qid: str, table_id: str, raw: dict, passages: dict[str, str]):
    """Build a Table from the ``tables_tok`` layout ([text, [urls]] pairs)."""
    reg = _DocRegistry()
    for url, text in passages.items():
        if text:
            reg.add(url, _title_from_url(url), text)
    headers = tuple(h[0] if isinstance(h, list) else h for h in raw["header"])
    rows, unresolved = [], []
    for r, raw_row in enumerate(raw["data"]):
        if len(raw_row) != len(headers):
            raise CorpusError(
                f"row arity mismatch in {qid}: row {r} has {len(raw_row)} cells "
                f"for {len(headers)} headers"
            )
        cells = []
        for h, entry in enumerate(raw_row):
            text, urls = (entry[0], entry[1]) if isinstance(entry, list) else (entry, [])
            ids = []
            for u in urls:
                doc_id = reg.resolve(u)
                if doc_id is None:
                    unresolved.append(u)
                else:
                    ids.append(doc_id)
            cells.append(Cell(r, h, text, tuple(ids)))
        rows.append(tuple(cells))
    if unresolved:
        raise CorpusError(f"dangling link in {qid}: unresolved doc ids {sorted(set(unresolved))}")
    name = raw.get("title", "")
    if raw.get("section_title"):
        name = f"{name} - {raw['section_title']}" if name else raw["section_title"]
    return Table(table_id, name, headers, tuple(rows)), reg.docs


def _build_plain_table(qid: str, table_id: str, raw: dict, passages: dict[str, str]):
    """Plain tables carry no hyperlinks; cells link to passages with equal titles."""
    reg = _DocRegistry()
    by_title: dict[str, str] = {}
    for url, text in passages.items():
        if text:
            title = _title_from_url(url)
            by_title.setdefault(normalize_text(title), reg.add(url, title, text))
    headers = tuple(raw["header"])
    rows = []
    for r, raw_row in enumerate(raw["data"]):
        if len(raw_row) != len(headers):
            raise CorpusError(
                f"row arity mismatch in {qid}: row {r} has {len(raw_row)} cells "
                f"for {len(headers)} headers"
            )
        cells = []
        for h, text in enumerate(raw_row):
            doc_id = by_title.get(normalize_text(text))
            cells.append(Cell(r, h, text, (doc_id,) if doc_id else ()))
        rows.append(tuple(cells))
    return Table(table_id, raw.get("title", ""), headers, tuple(rows)), reg.docs


def _golds(rec: dict) -> tuple[str, ...]:
    ans = rec.get("answer-text", rec.get("answers", []))
    if isinstance(ans, str):
        return (ans,)
    return tuple(ans)


def _load_hybridqa(path: Path, split: str) -> list[TableTextInstance]:
    qfile = path / "released_data" / f"{split}.json"
    if not qfile.exists():
        raise CorpusError(f"missing Hybrid-QA question file {qfile}")
    tables_dir = path / "WikiTables-WithLinks" / "tables_tok"
    requests_dir = path / "WikiTables-WithLinks" / "request_tok"
    with open(qfile, encoding="utf-8") as f:
        records = json.load(f)
    cache: dict[str, tuple] = {}
    out = []
    for rec in records:
        qid = str(rec.get("question_id", "<unknown>"))
        table_id = _require(rec, "table_id", qid)
        question = _require(rec, "question", qid)
        if table_id not in cache:
            tfile = tables_dir / f"{table_id}.json"
            if not tfile.exists():
                raise CorpusError(f"malformed record {qid}: table file {tfile} not found")
            raw = json.loads(tfile.read_text(encoding="utf-8"))
            rfile = requests_dir / f"{table_id}.json"
            passages = json.loads(rfile.read_text(encoding="utf-8")) if rfile.exists() else {}
            cache[table_id] = _build_tok_table(qid, table_id, raw, passages)
        table, docs = cache[table_id]
        out.append(TableTextInstance(qid, question, table, docs, _golds(rec)))
    return out


def _load_ottqa(path: Path) -> list[TableTextInstance]:
    with open(path, encoding="utf-8") as f:
        records = json.load(f) if path.suffix == ".json" else [json.loads(l) for l in f if l.strip()]
    out = []
    for rec in records:
        qid = str(rec.get("question_id", "<unknown>"))
        question = _require(rec, "question", qid)
        raw = _require(rec, "table", qid)
        passages = rec.get("passages", {})
        table_id = str(rec.get("table_id", raw.get("uid", qid)))
        header = raw.get("header", [])
        tok = bool(header) and isinstance(header[0], list)
        build = _build_tok_table if tok else _build_plain_table
        table, docs = build(qid, table_id, raw, passages)
        out.append(TableTextInstance(qid, question, table, docs, _golds(rec)))
    return out


def load_corpus(path: str | Path, format: str = "native", split: str = "dev") -> list[TableTextInstance]:
    """Load instances from ``path``; source order is preserved."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    if format == "native":
        return _load_native(path)
    if format == "hybridqa":
        return _load_hybridqa(path, split)
    if format == "ottqa":
        return _load_ottqa(path)
    raise ValueError(f"no adapter for corpus format {format!r}")


def sample_instances(
    instances: Sequence[TableTextInstance], size: int | None, seed: int = 0
) -> list[TableTextInstance]:
    """Seeded uniform sample without replacement, returned in source order."""
    if size is None or size >= len(instances):
        return list(instances)
    idx = sorted(random.Random(seed).sample(range(len(instances)), size))
    return [instances[i] for i in idx]

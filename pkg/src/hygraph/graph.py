"""The hybrid graph: a sub-table joined to an entity-document bipartite graph.

Three node kinds and three undirected edge kinds:

========  ===================  =============================================
edge      endpoints            meaning
========  ===================  =============================================
row       cell -- cell         both cells sit in the same table row
mention   document -- entity   the entity was extracted from the document
link      entity -- cell       the entity's document is linked from the cell
========  ===================  =============================================

Cell keys are ``r{row}:h{header}`` with indices into the *original* table, so
node ids stay stable if the sub-table later gains a column.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

from .corpus import Cell, Table, TableTextInstance
from .ner import DocEntity

CELL, ENTITY, DOCUMENT = "cell", "entity", "document"
ROW, MENTION, LINK = "row", "mention", "link"


class NodeId(NamedTuple):
    kind: str
    key: str

    @staticmethod
    def cell(row_index: int, header_index: int) -> "NodeId":
        return NodeId(CELL, f"r{row_index}:h{header_index}")

    @property
    def cell_position(self) -> tuple[int, int]:
        r, h = self.key.split(":")
        return int(r[1:]), int(h[1:])


def node_order(n: NodeId):
    return (n.key, n.kind)


@dataclass
class NodeData:
    label: str
    header: str | None = None  # cells only
    doc_ids: tuple[str, ...] = ()  # cells: linked docs; entities: source docs


@dataclass
class SubTable:
    table: Table
    header_indices: list[int]

    @property
    def headers(self) -> list[str]:
        return [self.table.headers[i] for i in self.header_indices]

    def cells(self) -> Iterator[Cell]:
        for row in self.table.rows:
            for h in self.header_indices:
                yield row[h]


@dataclass
class EntityDocumentGraph:
    """Bipartite fragment: document nodes, shared entity nodes, mention edges."""

    doc_titles: dict[str, str] = field(default_factory=dict)
    entities: dict[str, str] = field(default_factory=dict)  # normalized -> surface
    mentions: dict[str, list[str]] = field(default_factory=dict)  # doc_id -> [normalized]


@dataclass
class HybridGraph:
    nodes: dict[NodeId, NodeData] = field(default_factory=dict)
    adj: dict[NodeId, dict[NodeId, str]] = field(default_factory=dict)
    sub_table_headers: list[str] = field(default_factory=list)

    def add_node(self, n: NodeId, data: NodeData) -> None:
        if n not in self.nodes:
            self.nodes[n] = data
            self.adj[n] = {}

    def add_edge(self, a: NodeId, b: NodeId, kind: str) -> None:
        if a == b:
            return
        self.adj[a][b] = kind
        self.adj[b][a] = kind

    def neighbors(self, n: NodeId) -> list[NodeId]:
        return sorted(self.adj.get(n, ()), key=node_order)

    def edge_kind(self, a: NodeId, b: NodeId) -> str | None:
        return self.adj.get(a, {}).get(b)

    def edges(self) -> list[tuple[NodeId, NodeId, str]]:
        """Each undirected edge once, endpoints in node order."""
        out = []
        for a, nbrs in self.adj.items():
            for b, kind in nbrs.items():
                if node_order(a) < node_order(b):
                    out.append((a, b, kind))
        return sorted(out, key=lambda e: (node_order(e[0]), node_order(e[1])))

    def nodes_of(self, kind: str) -> list[NodeId]:
        return sorted((n for n in self.nodes if n.kind == kind), key=node_order)

    def label(self, n: NodeId) -> str:
        """Traversal label: cells carry their header after ``;``."""
        d = self.nodes[n]
        return f"{d.label}; {d.header}" if n.kind == CELL else d.label

    def to_json(self) -> dict:
        return {
            "sub_table_headers": list(self.sub_table_headers),
            "nodes": [
                {"kind": n.kind, "key": n.key, "label": d.label, "header": d.header, "doc_ids": list(d.doc_ids)}
                for n, d in sorted(self.nodes.items(), key=lambda kv: node_order(kv[0]))
            ],
            "edges": [[a.kind, a.key, b.kind, b.key, k] for a, b, k in self.edges()],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, indent=1)


def retrieve_sub_table(table: Table, relevant_headers: Iterable[str]) -> SubTable:
    """All rows of ``table`` restricted to ``relevant_headers`` (table column order)."""
    wanted = []
    for h in relevant_headers:
        try:
            wanted.append(table.header_index(h))
        except KeyError:
            raise ValueError(f"unknown header {h!r} for table {table.table_id}") from None
    if not wanted:
        raise ValueError("sub-table needs at least one header")
    return SubTable(table, sorted(set(wanted)))


def build_entity_document_graph(documents, ner) -> EntityDocumentGraph:
    """Run ``ner`` over every document (doc_id order) and collect mentions."""
    frag = EntityDocumentGraph()
    for doc_id in sorted(documents):
        doc = documents[doc_id]
        frag.doc_titles[doc_id] = doc.title
        ents: list[DocEntity] = ner(doc)
        frag.mentions[doc_id] = []
        for e in ents:
            frag.entities.setdefault(e.normalized, e.surface)
            if e.normalized not in frag.mentions[doc_id]:
                frag.mentions[doc_id].append(e.normalized)
    return frag


def assemble_hybrid_graph(sub: SubTable, frag: EntityDocumentGraph, instance: TableTextInstance) -> HybridGraph:
    g = HybridGraph(sub_table_headers=sub.headers)
    sources: dict[str, list[str]] = {}
    for doc_id, ents in frag.mentions.items():
        for e in ents:
            sources.setdefault(e, []).append(doc_id)
    for doc_id, title in frag.doc_titles.items():
        g.add_node(NodeId(DOCUMENT, doc_id), NodeData(title))
    for norm, surface in frag.entities.items():
        g.add_node(NodeId(ENTITY, norm), NodeData(surface, doc_ids=tuple(sources.get(norm, ()))))
    for doc_id, ents in frag.mentions.items():
        for e in ents:
            g.add_edge(NodeId(DOCUMENT, doc_id), NodeId(ENTITY, e), MENTION)

    table = sub.table
    for row in table.rows:
        ids = []
        for h in sub.header_indices:
            cell = row[h]
            n = NodeId.cell(cell.row_index, h)
            g.add_node(n, NodeData(cell.text, header=table.headers[h], doc_ids=cell.linked_doc_ids))
            ids.append(n)
            for doc_id in cell.linked_doc_ids:
                if doc_id not in instance.documents:
                    raise ValueError(f"dangling link {doc_id!r} in {instance.question_id}")
                for e in frag.mentions.get(doc_id, ()):
                    g.add_edge(NodeId(ENTITY, e), n, LINK)
        for i, a in enumerate(ids):
            for b in ids[i + 1 :]:
                g.add_edge(a, b, ROW)
    return g


def build_hybrid_graph(instance: TableTextInstance, relevant_headers, ner, frag: EntityDocumentGraph | None = None):
    """Convenience: sub-table + entity-document graph + assembly in one call."""
    sub = retrieve_sub_table(instance.table, relevant_headers)
    if frag is None:
        frag = build_entity_document_graph(instance.documents, ner)
    return assemble_hybrid_graph(sub, frag, instance)


def collect_entity_total(g: HybridGraph) -> set[str]:
    return {n.key for n in g.nodes if n.kind == ENTITY}

"""Seed matching and breadth-first pruning of the hybrid graph."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .analysis import OTHERS, QuestionAnalysis
from .corpus import Table, TableTextInstance, normalize_text
from .graph import CELL, ENTITY, NodeId, HybridGraph, node_order

DEFAULT_THRESHOLD = 0.8
DEFAULT_MAX_HOPS = 3
FULL = "FULL"


# ---------------------------------------------------------------------------
# similarity providers


def _tokens(s: str) -> set[str]:
    return set(normalize_text(s).split())


def overlap_similarity(a: str, b: str) -> float:
    """|A & B| / min(|A|, |B|) over normalized word sets."""
    ta, tb = _tokens(a), _tokens(b)
    if not ta or not tb:
        return 1.0 if normalize_text(a) == normalize_text(b) else 0.0
    return len(ta & tb) / min(len(ta), len(tb))


def dice_similarity(a: str, b: str) -> float:
    ta, tb = _tokens(a), _tokens(b)
    if not ta or not tb:
        return 1.0 if normalize_text(a) == normalize_text(b) else 0.0
    return 2 * len(ta & tb) / (len(ta) + len(tb))


class EmbeddingError(RuntimeError):
    pass


@dataclass
class EmbeddingProvider:
    provider_id: str
    similarity: Callable[[str, str], float]


def lexical_fallback(method: str = "dice") -> EmbeddingProvider:
    fn = {"overlap": overlap_similarity, "dice": dice_similarity}[method]
    return EmbeddingProvider("lexical_fallback", fn)


def external_embed(endpoint: str, embed: Callable[[list[str]], list[list[float]]] | None = None) -> EmbeddingProvider:
    """Cosine similarity over vectors from an HTTP embedding service.

    The service takes ``{"input": [...]}`` and answers ``{"data": [{"embedding": [...]}]}``.
    Cosine is clipped to [0, 1].
    """
    if embed is None:
        import httpx

        client = httpx.Client(timeout=60.0)

        def embed(texts):
            try:
                r = client.post(endpoint, json={"input": texts})
                r.raise_for_status()
            except httpx.HTTPError as e:
                raise EmbeddingError(f"embedding service failed: {e}") from e
            return [d["embedding"] for d in r.json()["data"]]

    cache: dict[str, list[float]] = {}

    def vec(s):
        if s not in cache:
            cache[s] = embed([s])[0]
        return cache[s]

    def sim(a, b):
        va, vb = vec(a), vec(b)
        na = math.sqrt(sum(x * x for x in va))
        nb = math.sqrt(sum(x * x for x in vb))
        if not na or not nb:
            return 0.0
        return max(0.0, min(1.0, sum(x * y for x, y in zip(va, vb)) / (na * nb)))

    return EmbeddingProvider("external_embed", sim)


# ---------------------------------------------------------------------------
# semantic matching


@dataclass
class MatchResult:
    question_entity: str
    matched_node: Optional[NodeId]
    score: float
    search_space: str  # header_column | entity_total | expanded_all_columns


def _best(entity: str, candidates, ep: EmbeddingProvider):
    best_node, best_score = None, -1.0
    for node, text in candidates:
        s = ep.similarity(entity, text)
        if s > best_score or (s == best_score and best_node is not None and node_order(node) < node_order(best_node)):
            best_node, best_score = node, s
    return best_node, max(best_score, 0.0)


def _column(table: Table, h: int):
    return [(NodeId.cell(c.row_index, h), c.text) for c in table.column(h)]


def strip_header_words(entity: str, header: str) -> str:
    """Drop words of ``entity`` that just name the column ("position 4" in Pos -> "4")."""
    names = set(normalize_text(header).split())
    kept = []
    for w in normalize_text(entity).split():
        named = any(w == n or (len(n) >= 3 and (w.startswith(n) or n.startswith(w) and len(w) >= 3)) for n in names)
        if not named:
            kept.append(w)
    return " ".join(kept)


def semantic_match(
    analysis: QuestionAnalysis,
    g: HybridGraph,
    table: Table,
    ep: EmbeddingProvider,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[MatchResult]:
    """Matched seeds, one per question entity that cleared ``threshold``.

    Header-mapped entities are compared with that column's cells, Others-mapped
    ones with ``entity_total``. A header-mapped entity that fails is retried
    against every table column; a match there may name a cell outside ``g``.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    entity_nodes = [(n, g.nodes[n].label) for n in g.nodes_of(ENTITY)]
    results = []
    for ent in analysis.entities:
        targets = analysis.entity_header_map.get(ent, [OTHERS])
        queries, use_entities = [], False
        for t in targets:
            if t == OTHERS:
                use_entities = True
                continue
            try:
                h = table.header_index(t)
            except KeyError:
                use_entities = True
                continue
            q = strip_header_words(ent, t)
            if q:
                queries.append((q, _column(table, h)))
        best = (None, 0.0, "header_column")
        for q, cands in queries:
            n, s_ = _best(q, cands, ep)
            if best[0] is None or s_ > best[1]:
                best = (n, s_, "header_column")
        if use_entities:
            n, s_ = _best(ent, entity_nodes, ep)
            if n is not None and (best[0] is None or s_ > best[1]):
                best = (n, s_, "entity_total")
        if best[1] < threshold and queries:
            for q, _ in queries:
                everything = [c for h in range(len(table.headers)) for c in _column(table, h)]
                n, s_ = _best(q, everything, ep)
                if s_ >= threshold and s_ > best[1]:
                    best = (n, s_, "expanded_all_columns")
        node, score, space = best
        results.append(MatchResult(ent, node if score >= threshold else None, score, space))
    return results


def seeds_of(matches: Sequence[MatchResult]) -> list[NodeId]:
    out = []
    for m in matches:
        if m.matched_node is not None and m.matched_node not in out:
            out.append(m.matched_node)
    return sorted(out, key=node_order)


# ---------------------------------------------------------------------------
# BFS


@dataclass(frozen=True)
class PathTriple:
    from_label: str
    relation: str
    to_label: str
    source: NodeId = field(compare=False)
    target: NodeId = field(compare=False)

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.from_label, self.relation, self.to_label)


@dataclass
class HopDictionary:
    hops: dict[int, list[PathTriple]]
    distances: dict[NodeId, int]
    seeds: list[NodeId]
    sub_table_headers: list[str]
    max_hops: int = DEFAULT_MAX_HOPS

    def nodes_within(self, k: int) -> list[NodeId]:
        return sorted((n for n, d in self.distances.items() if d <= k), key=node_order)

    def is_empty(self) -> bool:
        return not any(self.hops.values())

    def to_json(self) -> dict:
        return {f"{k}-hop": [list(t.as_tuple()) for t in self.hops.get(k, [])] for k in range(1, self.max_hops + 1)}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False)


def _relation(g: HybridGraph, target: NodeId) -> str:
    return g.nodes[target].header if target.kind == CELL else "entity"


def bfs_prune(g: HybridGraph, seeds: Sequence[NodeId], max_hops: int = DEFAULT_MAX_HOPS) -> HopDictionary:
    """Joint BFS from all seeds over cell and entity nodes.

    Document nodes are payload only and never traversed. A triple is recorded
    at hop k for every edge from a node at distance k-1 to a node first
    reached at distance k.
    """
    seeds = sorted({s for s in seeds if s in g.nodes and s.kind != "document"}, key=node_order)
    dist = {s: 0 for s in seeds}
    hops: dict[int, list[PathTriple]] = {k: [] for k in range(1, max_hops + 1)}
    frontier = list(seeds)
    for k in range(1, max_hops + 1):
        fresh: list[NodeId] = []
        for u in frontier:
            for v in g.neighbors(u):
                if v.kind == "document":
                    continue
                if v not in dist:
                    dist[v] = k
                    fresh.append(v)
                if dist[v] == k:
                    hops[k].append(PathTriple(g.label(u), _relation(g, v), g.nodes[v].label, u, v))
        frontier = sorted(fresh, key=node_order)
        if not frontier:
            break
    return HopDictionary(hops, dist, seeds, list(g.sub_table_headers), max_hops)


@dataclass
class FallbackContext:
    instance: TableTextInstance
    fallback: bool = True


def fallback_context(instance: TableTextInstance) -> FallbackContext:
    return FallbackContext(instance)

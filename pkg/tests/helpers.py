"""Shared builders for tests: tiny instances, a fixed NER, fake transports."""

import random

from hypothesis import strategies as st

from hygraph.corpus import Cell, Document, Table, TableTextInstance, normalize_text
from hygraph.llm import Completion, TransportError
from hygraph.ner import DocEntity

ENTITY_POOL = ["Alpha", "Beta", "Gamma", "Delta", "Epsilon", "Zeta", "Eta", "Theta"]


class SplitNer:
    """Entities are the ``;``-separated parts of a document's text."""

    name = "split"

    def __call__(self, doc):
        out, seen = [], set()
        for part in doc.text.split(";"):
            s = part.strip()
            if s and normalize_text(s) not in seen:
                seen.add(normalize_text(s))
                out.append(DocEntity(s, normalize_text(s), doc.doc_id, None))
        return out


def make_instance(rows, headers=None, docs=None, question="q?", golds=("x",), qid="t1", name="T"):
    """``rows`` is a list of lists of ``text`` or ``(text, [doc ids])``."""
    headers = headers or [f"H{i}" for i in range(len(rows[0]))]
    cells = []
    for r, row in enumerate(rows):
        out = []
        for h, c in enumerate(row):
            text, links = (c, ()) if isinstance(c, str) else c
            out.append(Cell(r, h, text, tuple(links)))
        cells.append(tuple(out))
    documents = {d: Document(d, t, x) for d, (t, x) in (docs or {}).items()}
    return TableTextInstance(qid, question, Table(qid, name, tuple(headers), tuple(cells)), documents, tuple(golds))


def random_instance(rng: random.Random, max_rows=5, max_cols=4, max_docs=6):
    n_rows = rng.randint(1, max_rows)
    n_cols = rng.randint(1, max_cols)
    n_docs = rng.randint(0, max_docs)
    docs = {}
    for i in range(n_docs):
        ents = rng.sample(ENTITY_POOL, rng.randint(1, 3))
        docs[f"d{i}"] = (f"Doc {i}", "; ".join(ents))
    doc_ids = sorted(docs)
    rows = []
    for r in range(n_rows):
        row = []
        for h in range(n_cols):
            links = rng.sample(doc_ids, rng.randint(0, min(2, len(doc_ids)))) if doc_ids else []
            text = rng.choice(ENTITY_POOL + [f"v{r}{h}", str(r)])
            row.append((text, links))
        rows.append(row)
    return make_instance(rows, docs=docs)


instance_seeds = st.integers(min_value=0, max_value=2**32 - 1)


class CountingTransport:
    """Returns canned text (a callable of the request) and counts calls."""

    def __init__(self, reply=lambda req: "ok"):
        self.reply = reply
        self.calls = 0
        self.requests = []

    def send(self, req):
        self.calls += 1
        self.requests.append(req)
        out = self.reply(req)
        return out if isinstance(out, Completion) else Completion(out)


class FlakyTransport:
    """Fails ``failures`` times with a retriable error, then answers."""

    def __init__(self, failures, retriable=True):
        self.failures = failures
        self.retriable = retriable
        self.calls = 0

    def send(self, req):
        self.calls += 1
        if self.calls <= self.failures:
            raise TransportError("boom", retriable=self.retriable)
        return Completion("fine", 7, 1)


# ---------------------------------------------------------------------------
# graph oracles shared by unit and acceptance tests

def graph_violations(g, inst, frag):
    """Structural invariant violations of an assembled hybrid graph (empty when sound)."""
    from hygraph.graph import CELL, DOCUMENT, ENTITY, LINK, MENTION, ROW

    bad = []
    for a, b, kind in g.edges():
        if g.edge_kind(b, a) != kind:
            bad.append(("asymmetric", a, b))
        kinds = {a.kind, b.kind}
        if kind == ROW:
            if kinds != {CELL} or a.cell_position[0] != b.cell_position[0]:
                bad.append(("row", a, b))
        elif kind == MENTION:
            if kinds != {DOCUMENT, ENTITY}:
                bad.append(("mention", a, b))
        elif kind == LINK:
            if kinds != {CELL, ENTITY}:
                bad.append(("link-kinds", a, b))
                continue
            ent, cell = (a, b) if a.kind == ENTITY else (b, a)
            r, h = cell.cell_position
            witnesses = [d for d in inst.table.cell(r, h).linked_doc_ids if ent.key in frag.mentions.get(d, [])]
            if not witnesses or not any(g.edge_kind(("document", d), ent) == MENTION for d in witnesses):
                bad.append(("unwitnessed", ent, cell))
        else:
            bad.append(("kind", a, b))
    # without link edges, cells only reach cells
    for start in g.nodes_of(CELL):
        seen, stack = {start}, [start]
        while stack:
            u = stack.pop()
            for v, kind in g.adj[u].items():
                if kind != LINK and v not in seen:
                    seen.add(v)
                    stack.append(v)
        if any(n.kind != CELL for n in seen):
            bad.append(("component", start))
    return bad


def oracle_distances(g, seeds):
    """Shortest hop counts from the seed set over cell and entity nodes (Floyd-Warshall)."""
    import numpy as np
    from scipy.sparse.csgraph import floyd_warshall

    nodes = [n for n in g.nodes if n.kind != "document"]
    index = {n: i for i, n in enumerate(nodes)}
    m = np.zeros((len(nodes), len(nodes)))
    for a, b, _ in g.edges():
        if a in index and b in index:
            m[index[a], index[b]] = m[index[b], index[a]] = 1
    dist = floyd_warshall(m, directed=False, unweighted=True)
    rows = [index[s] for s in seeds]
    best = dist[rows].min(axis=0)
    return {n: best[index[n]] for n in nodes}

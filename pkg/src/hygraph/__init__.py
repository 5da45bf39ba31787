"""Hybrid table-text question answering with graph-pruned, hop-wise reading."""

from .corpus import Cell, Document, Table, TableTextInstance, load_corpus, normalize_text
from .llm import LlmExchange, LlmGateway, LlmRequest, ReplayMiss
from .metrics import normalize_answer, report, score
from .pipeline import Pipeline, RunConfig, run

__all__ = [
    "Cell", "Document", "Table", "TableTextInstance", "load_corpus", "normalize_text",
    "LlmExchange", "LlmGateway", "LlmRequest", "ReplayMiss",
    "normalize_answer", "report", "score",
    "Pipeline", "RunConfig", "run",
]

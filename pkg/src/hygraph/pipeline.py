"""End-to-end runs: one record per instance plus an aggregate report."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .analysis import QuestionAnalysis, analyze
from .corpus import TableTextInstance, load_corpus, sample_instances
from .graph import HybridGraph, build_entity_document_graph, assemble_hybrid_graph, retrieve_sub_table
from .llm import LlmGateway
from .metrics import ScoreRow, report, score_row
from .ner import make_ner
from .reader import BASELINE_MODES, ReaderOutcome, answer_baseline, answer_full, answer_hopwise, answer_no_hopwise
from .tokens import DEFAULT_TOKENIZER
from .traversal import (
    DEFAULT_MAX_HOPS,
    DEFAULT_THRESHOLD,
    HopDictionary,
    MatchResult,
    bfs_prune,
    external_embed,
    lexical_fallback,
    seeds_of,
    semantic_match,
)

logger = logging.getLogger(__name__)

ODYSSEY_MODES = ("odyssey_hopwise", "odyssey_flat")
MODES = ODYSSEY_MODES + BASELINE_MODES


@dataclass
class RunConfig:
    corpus: Optional[str] = None
    format: str = "native"
    split: str = "dev"
    sample_size: Optional[int] = None
    seed: int = 0
    mode: str = "odyssey_hopwise"
    analysis_model: str = "gpt-3.5-turbo-1106"
    reader_model: str = "gpt-4-1106-preview"
    summary_model: str = "gpt-3.5-turbo-1106"
    temperature: float = 0.0
    threshold: float = DEFAULT_THRESHOLD
    max_hops: int = DEFAULT_MAX_HOPS
    gateway_mode: str = "replay"
    cache_dir: Optional[str] = None
    tokenizer: str = DEFAULT_TOKENIZER
    parallelism: int = 1
    ner: str = "rule_ner"
    ner_endpoint: Optional[str] = None
    embedder: str = "lexical_fallback"
    similarity: str = "dice"
    embed_endpoint: Optional[str] = None
    input_rate: float = 10.0 / 1_000_000

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.max_hops < 1:
            raise ValueError("max_hops must be >= 1")

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "RunConfig":
        path = Path(path)
        if path.suffix == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        else:
            data = json.loads(path.read_text(encoding="utf-8"))
        unknown = set(data) - set(cls.field_names())
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


@dataclass
class InstanceResult:
    instance: TableTextInstance
    outcome: ReaderOutcome
    analysis: Optional[QuestionAnalysis] = None
    matches: list[MatchResult] = field(default_factory=list)
    hopdict: Optional[HopDictionary] = None
    graph: Optional[HybridGraph] = None

    @property
    def exchanges(self):
        pre = self.analysis.exchanges if self.analysis else []
        return list(pre) + list(self.outcome.exchanges)

    def token_totals(self) -> dict[str, int]:
        reader = [e for e in self.outcome.exchanges if e.request.purpose_tag in ("reader", "baseline")]
        return {
            "input": sum(e.input_tokens for e in self.exchanges),
            "output": sum(e.output_tokens for e in self.exchanges),
            "reader_input": sum(e.input_tokens for e in reader),
            "analysis_input": sum(e.input_tokens for e in (self.analysis.exchanges if self.analysis else [])),
        }

    def score_row(self, mode: str) -> ScoreRow:
        t = self.token_totals()
        golds = list(self.instance.gold_answers) or [""]
        return score_row(
            self.instance.question_id, self.outcome.answer, golds, self.outcome.hop_answered,
            t["input"], t["output"], mode, t["reader_input"],
        )

    def record(self, mode: str) -> dict:
        row = self.score_row(mode)
        return {
            "question_id": self.instance.question_id,
            "mode": mode,
            "hop_answered": self.outcome.hop_answered,
            "answer": self.outcome.answer,
            "gold": list(self.instance.gold_answers),
            "fallback": self.outcome.fallback,
            "seeds": [list(s) for s in (self.hopdict.seeds if self.hopdict else [])],
            "exchanges": [{"key": e.cache_key, "purpose": e.request.purpose_tag} for e in self.exchanges],
            "tokens": self.token_totals(),
            "em": row.em,
            "f1": round(row.f1, 6),
            "precision": round(row.precision, 6),
            "recall": round(row.recall, 6),
        }


class Pipeline:
    """Runs one configured mode over instances with a shared gateway."""

    def __init__(self, config: RunConfig, gw: LlmGateway | None = None):
        self.config = config
        self.gw = gw or LlmGateway(
            mode=config.gateway_mode,
            cache_dir=config.cache_dir,
            tokenizer_id=config.tokenizer,
            temperature=config.temperature,
            max_in_flight=max(1, config.parallelism),
        )
        self.ner = make_ner(config.ner, gw=self.gw, endpoint=config.ner_endpoint, model=config.analysis_model)
        if config.embedder == "external_embed":
            if not config.embed_endpoint:
                raise ValueError("external_embed needs embed_endpoint")
            self.embedder = external_embed(config.embed_endpoint)
        else:
            self.embedder = lexical_fallback(config.similarity)

    def build_graph(self, inst: TableTextInstance, analysis: QuestionAnalysis, frag=None):
        if frag is None:
            frag = build_entity_document_graph(inst.documents, self.ner)
        sub = retrieve_sub_table(inst.table, analysis.relevant_headers)
        return assemble_hybrid_graph(sub, frag, inst), frag

    def traverse(self, inst: TableTextInstance, analysis: QuestionAnalysis):
        """Graph, matches and hop dictionary (``None`` when nothing matched)."""
        g, frag = self.build_graph(inst, analysis)
        matches = semantic_match(analysis, g, inst.table, self.embedder, self.config.threshold)
        seeds = seeds_of(matches)
        extra = []
        for s in seeds:
            if s not in g.nodes and s.kind == "cell":
                h = inst.table.headers[s.cell_position[1]]
                if h not in analysis.relevant_headers and h not in extra:
                    extra.append(h)
        if extra:
            wider = QuestionAnalysis(analysis.entities, list(analysis.relevant_headers) + extra, analysis.entity_header_map)
            g, _ = self.build_graph(inst, wider, frag)
        if not seeds:
            return g, matches, None
        return g, matches, bfs_prune(g, seeds, self.config.max_hops)

    def run_instance(self, inst: TableTextInstance) -> InstanceResult:
        cfg = self.config
        if cfg.mode in ("base", "full_context", "summarized_text", "summarized_both"):
            out = answer_baseline(inst, cfg.mode, self.gw, cfg.reader_model, cfg.summary_model)
            return InstanceResult(inst, out)
        analysis = analyze(inst, self.gw, cfg.analysis_model)
        if not analysis.entities:
            out = answer_full(inst, self.gw, cfg.reader_model, cfg.tokenizer)
            return InstanceResult(inst, out, analysis)
        if cfg.mode == "complete_graph":
            g, _ = self.build_graph(inst, analysis)
            out = answer_baseline(inst, cfg.mode, self.gw, cfg.reader_model, graph=g)
            return InstanceResult(inst, out, analysis, graph=g)
        g, matches, hopdict = self.traverse(inst, analysis)
        if cfg.mode == "odyssey_hopwise":
            out = answer_hopwise(inst, hopdict, self.gw, cfg.max_hops, cfg.reader_model, cfg.tokenizer)
        else:
            out = answer_no_hopwise(inst, hopdict, self.gw, cfg.reader_model, cfg.tokenizer)
        return InstanceResult(inst, out, analysis, matches, hopdict, g)

    def run(self, instances) -> list[InstanceResult]:
        if self.config.parallelism <= 1:
            return [self.run_instance(i) for i in instances]
        with ThreadPoolExecutor(self.config.parallelism) as pool:
            return list(pool.map(self.run_instance, instances))


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=1, sort_keys=True) + "\n"


def write_results(results: list[InstanceResult], mode: str, out_dir: str | Path, rate: float = 10.0 / 1_000_000):
    """``records.jsonl``, ``report.json``, ``report.md`` and ``hops.csv`` under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "records.jsonl", "w", encoding="utf-8") as f:
        for r in results:
            f.write(json.dumps(r.record(mode), ensure_ascii=False, sort_keys=True) + "\n")
    rep = report([r.score_row(mode) for r in results], rate, mode)
    (out / "report.json").write_text(_dump(rep.to_dict()), encoding="utf-8")
    (out / "report.md").write_text(rep.markdown(), encoding="utf-8")
    (out / "hops.csv").write_text(rep.hop_csv(), encoding="utf-8")
    fallbacks = sum(1 for r in results if r.outcome.hop_answered == "FULL")
    logger.info("%s: %d/%d instances used the full context", mode, fallbacks, len(results))
    return rep


def run(config: RunConfig, out_dir: str | Path | None = None, gw: LlmGateway | None = None):
    instances = load_corpus(config.corpus, config.format, config.split)
    instances = sample_instances(instances, config.sample_size, config.seed)
    results = Pipeline(config, gw).run(instances)
    rep = write_results(results, config.mode, out_dir, config.input_rate) if out_dir else None
    return results, rep

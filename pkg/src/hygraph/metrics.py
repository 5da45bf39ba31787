"""Answer scoring, token/cost accounting and run reports."""

from __future__ import annotations

import collections
import csv
import io
import math
import re
import string
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .traversal import FULL

# GPT-4 Turbo input price on 15 June 2024: $10 per 1M tokens.
DEFAULT_INPUT_RATE = 10.0 / 1_000_000
HOP_LEVELS = (1, 2, 3, FULL)

_PUNCT = set(string.punctuation)


def normalize_answer(s: str) -> str:
    """Lower text and remove punctuation, articles and extra whitespace."""
    s = s.lower()
    s = "".join(ch for ch in s if ch not in _PUNCT)
    s = re.sub(r"\b(a|an|the)\b", " ", s)
    return " ".join(s.split())


def _prf(pred: str, gold: str) -> tuple[float, float, float]:
    p_toks = normalize_answer(pred).split()
    g_toks = normalize_answer(gold).split()
    common = collections.Counter(p_toks) & collections.Counter(g_toks)
    same = sum(common.values())
    if same == 0:
        return 0.0, 0.0, 0.0
    p = same / len(p_toks)
    r = same / len(g_toks)
    return p, r, 2 * p * r / (p + r)


def score(pred: str, golds: Sequence[str]) -> tuple[int, float, float, float]:
    """(em, f1, precision, recall), each the max over gold answers.

    The precision and recall reported are those of the gold that gives the
    best F1.
    """
    if not golds:
        raise ValueError("score needs at least one gold answer")
    pred = pred or ""
    em = int(any(normalize_answer(pred) == normalize_answer(g) for g in golds))
    best = max((_prf(pred, g) for g in golds), key=lambda t: (t[2], t[0], t[1]))
    p, r, f1 = best
    if em:
        p = r = f1 = 1.0
    return em, f1, p, r


@dataclass
class ScoreRow:
    question_id: str
    em: int
    f1: float
    precision: float
    recall: float
    hop_answered: Optional[object]
    input_tokens: int
    output_tokens: int
    mode: str
    reader_input_tokens: int = 0


def score_row(question_id, pred, golds, hop_answered, input_tokens, output_tokens, mode, reader_input_tokens=0):
    em, f1, p, r = score(pred or "", golds)
    return ScoreRow(question_id, em, f1, p, r, hop_answered, input_tokens, output_tokens, mode, reader_input_tokens)


def standard_error(em: float, n: int) -> float:
    return math.sqrt(em * (1 - em) / n) if n else 0.0


def token_reduction(baseline_tokens: float, method_tokens: float) -> float:
    """Fractional saving of ``method`` relative to ``baseline``."""
    return 1.0 - method_tokens / baseline_tokens


@dataclass
class HopStat:
    hop: object
    answered: int
    correct: int
    cumulative_em: float  # percent of all rows answered correctly at or before this hop
    standard_error: float  # percent
    mean_reader_tokens: float


@dataclass
class RunReport:
    mode: str
    n: int
    em: float
    f1: float
    precision: float
    recall: float
    mean_input_tokens: float
    mean_reader_input_tokens: float
    mean_output_tokens: float
    estimated_cost: float
    cost_per_1000: float
    query_info_efficiency: float
    hops: list[HopStat] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        for h in d["hops"]:
            h["hop"] = str(h["hop"])
        return d

    def markdown(self) -> str:
        return markdown_table([self])

    def hop_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["hop", "answered", "correct", "cumulative_em", "standard_error", "mean_reader_tokens"])
        for h in self.hops:
            w.writerow([h.hop, h.answered, h.correct, f"{h.cumulative_em:.4f}", f"{h.standard_error:.4f}", f"{h.mean_reader_tokens:.2f}"])
        return buf.getvalue()


def _hop_key(h) -> object:
    return h if h in (1, 2, 3) else FULL


def report(rows: Sequence[ScoreRow], rate_per_token: float = DEFAULT_INPUT_RATE, mode: str | None = None) -> RunReport:
    if not rows:
        raise ValueError("cannot report on an empty run")
    n = len(rows)

    def mean(attr):
        return sum(getattr(r, attr) for r in rows) / n

    mean_in = mean("input_tokens")
    mean_reader = mean("reader_input_tokens")
    hops, cum_correct = [], 0
    for level in HOP_LEVELS:
        at = [r for r in rows if _hop_key(r.hop_answered) == level]
        correct = sum(r.em for r in at)
        cum_correct += correct
        frac = cum_correct / n
        hops.append(
            HopStat(
                hop=level,
                answered=len(at),
                correct=correct,
                cumulative_em=100 * frac,
                standard_error=100 * standard_error(frac, n),
                mean_reader_tokens=sum(r.reader_input_tokens for r in at) / len(at) if at else 0.0,
            )
        )
    return RunReport(
        mode=mode or rows[0].mode,
        n=n,
        em=100 * mean("em"),
        f1=100 * mean("f1"),
        precision=100 * mean("precision"),
        recall=100 * mean("recall"),
        mean_input_tokens=mean_in,
        mean_reader_input_tokens=mean_reader,
        mean_output_tokens=mean("output_tokens"),
        estimated_cost=sum(r.reader_input_tokens for r in rows) * rate_per_token,
        cost_per_1000=mean_reader * 1000 * rate_per_token,
        query_info_efficiency=1.0 / mean_reader if mean_reader else 0.0,
        hops=hops,
    )


def markdown_table(reports: Sequence[RunReport]) -> str:
    """Methods as rows, in the usual published-results column layout."""
    lines = [
        "| Method | EM | F1 | P | R | Reader input tokens | Cost / 1000 ($) |",
        "|---|---|---|---|---|---|---|",
    ]
    for r in reports:
        lines.append(
            f"| {r.mode} | {r.em:.2f} | {r.f1:.2f} | {r.precision:.2f} | {r.recall:.2f} "
            f"| {r.mean_reader_input_tokens:.0f} | {r.cost_per_1000:.2f} |"
        )
    return "\n".join(lines) + "\n"


def comparison_table(reports: dict[str, dict]) -> str:
    """Side-by-side metrics, one column per run."""
    names = list(reports)
    fields = [("EM", "em"), ("F1", "f1"), ("P", "precision"), ("R", "recall"), ("Reader input tokens", "mean_reader_input_tokens"), ("n", "n")]
    lines = ["| Metric | " + " | ".join(names) + " |", "|---|" + "---|" * len(names)]
    for label, key in fields:
        cells = []
        for name in names:
            v = reports[name][key]
            cells.append(str(v) if key == "n" else f"{v:.2f}")
        lines.append(f"| {label} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"

import random

import pytest
from hypothesis import given, settings

from hygraph.analysis import QuestionAnalysis
from hygraph.graph import NodeId, build_hybrid_graph
from hygraph.llm import LlmGateway
from hygraph.ner import RuleNer
from hygraph.reader import (
    answer_baseline,
    answer_hopwise,
    answer_no_hopwise,
    build_hop_context,
    full_context,
    linearize,
    parse_reader_response,
)
from hygraph.templates import load_template
from hygraph.tokens import count_tokens
from hygraph.traversal import FULL, bfs_prune

from helpers import CountingTransport, SplitNer, instance_seeds, random_instance


@pytest.fixture(scope="module")
def nat(gp_instance):
    g = build_hybrid_graph(gp_instance, ["Pos", "Driver"], RuleNer())
    return gp_instance, bfs_prune(g, [NodeId.cell(3, 0)], 3)


def live(reply):
    t = CountingTransport(reply)
    return LlmGateway(mode="live", transport=t), t


def test_nat_hop1_context(nat):
    inst, hd = nat
    ctx = build_hop_context(hd, 1, [], inst)
    assert ctx.headers == ["Pos", "Driver"]
    assert ctx.rows == [["4", "Jenson Button"]]
    assert [t for t, _ in ctx.passages] == ["Jenson_Button"]
    assert ctx.token_estimate == count_tokens(ctx.table_data + "\n" + ctx.passage_text)
    assert ctx.token_estimate <= full_context(inst).token_estimate


def test_rows_cumulative_and_empty_filter(nat):
    inst, hd = nat
    c1, c2 = build_hop_context(hd, 1, [], inst), build_hop_context(hd, 2, [], inst)
    assert set(c1.row_indices) <= set(c2.row_indices)
    assert {t for t, _ in c1.passages} <= {t for t, _ in c2.passages}


def test_carried_passages_filter_old_docs_only(nat):
    inst, hd = nat
    c3_all = build_hop_context(hd, 3, [], inst)
    c3 = build_hop_context(hd, 3, ["Some_Unknown_Title"], inst)
    titles = {t for t, _ in c3.passages}
    assert "Jenson_Button" not in titles  # reached at hop 1, not carried
    assert "Juan_Pablo_Montoya" in titles  # first reached at hop 3
    assert titles < {t for t, _ in c3_all.passages}
    kept = build_hop_context(hd, 3, ["jenson button"], inst)
    assert "Jenson_Button" in {t for t, _ in kept.passages}


def test_hop_bounds(nat):
    inst, hd = nat
    with pytest.raises(ValueError):
        build_hop_context(hd, 0, [], inst)
    with pytest.raises(ValueError):
        build_hop_context(hd, 4, [], inst)


def test_linearize():
    assert linearize(["A", "B"], [["1", "x|y"]]) == "| A | B |\n| --- | --- |\n| 1 | x/y |"


@pytest.mark.parametrize(
    "text, answer, relevant",
    [
        ("Final Answer: British", "British", []),
        ("Final Answer: None\nRelevant Passages: ['Capcom']", None, ["Capcom"]),
        ("final answer: none.\nRelevant Passages: []", None, []),
        ("Final Answer: <NONE>", None, []),
        ("Final Answer:\nPS1", "PS1", []),
        ("Final Answer: None\nRelevant Passages: ['Jenson_Button', 'Brawn GP',]", None, ["Jenson_Button", "Brawn GP"]),
    ],
)
def test_parse_reader_response(text, answer, relevant):
    got_answer, got_rel, ok = parse_reader_response(text)
    assert ok and got_answer == answer and got_rel == relevant


def test_unparseable_is_none():
    assert parse_reader_response("I am not sure.") == (None, [], False)


def test_hopwise_answers_at_hop1(nat):
    inst, hd = nat
    gw, t = live(lambda r: "Final Answer: British" if "British racing driver" in r.prompt else "Final Answer: None")
    out = answer_hopwise(inst, hd, gw, 3)
    assert (out.answer, out.hop_answered, len(out.exchanges)) == ("British", 1, 1)
    prompt = t.requests[0].prompt
    assert prompt.startswith(load_template("reader_hopwise").split("{table_data}")[0])
    assert "| 4 | Jenson Button |" in prompt


def test_escalates_to_full(nat):
    inst, hd = nat
    gw, t = live(lambda r: "Final Answer: None\nRelevant Passages: []")
    out = answer_hopwise(inst, hd, gw, 3)
    assert out.answer is None and out.hop_answered == FULL and not out.fallback
    assert len(out.exchanges) == 4  # hops 1-3 plus the full context
    assert "Constructor" in t.requests[-1].prompt


def test_capcom_carry(nat):
    inst, hd = nat
    replies = iter(["Final Answer: None\nRelevant Passages: ['Jenson_Button']", "Final Answer: British"])
    gw, t = live(lambda r: next(replies))
    out = answer_hopwise(inst, hd, gw, 3)
    assert out.hop_answered == 2
    assert "Jenson_Button:" in t.requests[1].prompt


def test_no_hopdict_goes_full(gp_instance):
    gw, t = live(lambda r: "Final Answer: x")
    out = answer_hopwise(gp_instance, None, gw)
    assert out.hop_answered == FULL and out.fallback and t.calls == 1


def test_flat_single_call(nat):
    inst, hd = nat
    gw, t = live(lambda r: "Final Answer: British")
    out = answer_no_hopwise(inst, hd, gw)
    assert t.calls == 1 and out.answer == "British"
    assert "Juan_Pablo_Montoya:" in t.requests[0].prompt


def test_baseline_base(gp_instance):
    gw, t = live(lambda r: "Final Answer: British")
    out = answer_baseline(gp_instance, "base", gw)
    assert t.calls == 1 and out.answer == "British"
    assert "Jenson Button" not in t.requests[0].prompt and "| Pos |" not in t.requests[0].prompt


def test_baseline_full_context_has_everything(gp_instance):
    gw, t = live(lambda r: "Final Answer: British")
    answer_baseline(gp_instance, "full_context", gw)
    p = t.requests[0].prompt
    assert all(h in p for h in gp_instance.table.headers)
    assert all(d.title in p for d in gp_instance.documents.values())


def test_summarized_counts(gp_instance):
    gw, t = live(lambda r: "summary" if r.purpose_tag.startswith("summarize") else "Final Answer: x")
    out = answer_baseline(gp_instance, "summarized_text", gw)
    n = len(gp_instance.documents)
    assert [e.request.purpose_tag for e in out.exchanges] == ["summarize_text"] * n + ["baseline"]
    out = answer_baseline(gp_instance, "summarized_both", gw)
    assert [e.request.purpose_tag for e in out.exchanges][-2:] == ["summarize_table", "baseline"]
    assert "| Pos |" not in out.exchanges[-1].request.prompt


def test_complete_graph_serializes_graph(gp_instance):
    g = build_hybrid_graph(gp_instance, ["Pos", "Driver"], RuleNer())
    gw, t = live(lambda r: "Final Answer: British")
    out = answer_baseline(gp_instance, "complete_graph", gw, graph=g)
    assert out.answer == "British"
    assert "British | Driver | Jenson Button" in t.requests[0].prompt
    assert "4; Pos | Driver | Jenson Button" in t.requests[0].prompt
    with pytest.raises(ValueError):
        answer_baseline(gp_instance, "complete_graph", gw)


@settings(max_examples=60, deadline=None)
@given(instance_seeds)
def test_escalation_bounds_and_growth(seed):
    rng = random.Random(seed)
    inst = random_instance(rng)
    g = build_hybrid_graph(inst, list(inst.table.headers), SplitNer())
    seeds = [n for n in sorted(g.nodes) if n.kind == "cell"][:1]
    hd = bfs_prune(g, seeds, 3)
    gw, t = live(lambda r: "Final Answer: None")
    out = answer_hopwise(inst, hd, gw, 3)
    assert 1 <= len(out.exchanges) <= 4
    prev = set()
    for k in range(1, 4):
        rows = set(build_hop_context(hd, k, [], inst).row_indices)
        assert prev <= rows
        prev = rows
    assert build_hop_context(hd, 1, [], inst).token_estimate <= full_context(inst).token_estimate

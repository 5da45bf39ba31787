import pytest
from hypothesis import given, settings, strategies as st

from hygraph.analysis import OTHERS, DegenerateAnalysis, analyze, extract_entities, map_entities, select_headers
from hygraph.corpus import normalize_text
from hygraph.llm import LlmGateway
from hygraph.parsing import ParseError

from helpers import CountingTransport, make_instance

NAT_Q = "The driver who finished in position 4 in the 2004 United States Grand Prix was of what nationality ?"
NAT_HEADERS = ["Pos", "Driver", "Constructor", "Time", "Gap"]

OLYMPIC_Q = ("What was the nickname of the gold medal winner in the men's heavyweight "
             "Greco-Roman wrestling event of the 1932 Summer Olympics?")
OLYMPIC_HEADERS = ["Medal", "Name", "Sport", "Event"]


def gw_replying(**by_purpose):
    return LlmGateway(mode="live", transport=CountingTransport(lambda r: by_purpose[r.purpose_tag]))


# Replies in the exact shapes printed in the walkthrough and the 1-shot exemplar.
NAT_REPLIES = dict(
    entity_extract="Entities: ['driver', 'position 4', '2004 United States Grand Prix', 'nationality']",
    header_select="Relevant Headers: ['Pos', 'Driver']",
    entity_map="{\n  'driver': ['Driver'],\n  'position 4': ['Pos'],\n"
               "  '2004 United States Grand Prix': ['Others'],\n  'nationality': ['Others']\n}",
)


def test_nat_three_calls():
    gw = gw_replying(**NAT_REPLIES)
    ents = extract_entities(NAT_Q, "2004 United States Grand Prix", NAT_HEADERS, gw)
    assert ents == ["driver", "position 4", "2004 United States Grand Prix", "nationality"]
    heads = select_headers(NAT_Q, "2004 United States Grand Prix", NAT_HEADERS, ents, gw)
    assert heads == ["Pos", "Driver"]
    mapping = map_entities(NAT_Q, "2004 United States Grand Prix", ents, heads, gw, headers=NAT_HEADERS)
    assert mapping == {
        "driver": ["Driver"],
        "position 4": ["Pos"],
        "2004 United States Grand Prix": ["Others"],
        "nationality": ["Others"],
    }


def test_exemplar_outputs():
    gw = gw_replying(
        entity_extract="Entities: ['nickname', 'medal', 'gold', 'men's heavyweight', "
                       "'Greco-Roman Wrestling event', '1932 Summer Olympics']",
        header_select='Relevant headers: ["Medal", "Name", "Sport", "Event"]',
        entity_map='"gold medal": ["Medal"],\n"men\'s heavyweight": ["Event"],\n'
                   '"Greco-Roman Wrestling": ["Sport"],\n"1932 Summer Olympics": ["Others"]',
    )
    t = "Sweden at the 1932 Summer Olympics"
    ents = extract_entities(OLYMPIC_Q, t, OLYMPIC_HEADERS, gw)
    assert "Greco-Roman Wrestling event" in ents and "1932 Summer Olympics" in ents
    assert select_headers(OLYMPIC_Q, t, OLYMPIC_HEADERS, ents, gw) == OLYMPIC_HEADERS
    ents = ["gold medal", "men's heavyweight", "Greco-Roman Wrestling", "1932 Summer Olympics"]
    assert map_entities(OLYMPIC_Q, t, ents, OLYMPIC_HEADERS, gw, headers=OLYMPIC_HEADERS) == {
        "gold medal": ["Medal"],
        "men's heavyweight": ["Event"],
        "Greco-Roman Wrestling": ["Sport"],
        "1932 Summer Olympics": ["Others"],
    }


def test_prompt_carries_slots():
    t = CountingTransport(lambda r: NAT_REPLIES[r.purpose_tag])
    gw = LlmGateway(mode="live", transport=t)
    extract_entities(NAT_Q, "2004 United States Grand Prix", NAT_HEADERS, gw)
    p = t.requests[0].prompt
    assert NAT_Q in p and "Table Name: 2004 United States Grand Prix" in p
    assert '["Pos", "Driver", "Constructor", "Time", "Gap"]' in p
    assert "{question}" not in p


def test_prose_is_parse_error():
    gw = gw_replying(entity_extract="The entities are driver and nationality.")
    with pytest.raises(ParseError):
        extract_entities(NAT_Q, "t", NAT_HEADERS, gw)


def test_empty_entities_degenerate():
    gw = gw_replying(entity_extract="Entities: []")
    with pytest.raises(DegenerateAnalysis):
        extract_entities(NAT_Q, "t", NAT_HEADERS, gw)


def test_duplicates_removed_keep_first():
    gw = gw_replying(entity_extract="Entities: ['Driver', 'driver', 'pos', 'Driver ']")
    assert extract_entities(NAT_Q, "t", NAT_HEADERS, gw) == ["Driver", "pos"]


def test_unknown_headers_dropped_then_all():
    gw = gw_replying(header_select="Relevant headers: ['Nation', 'pos']")
    assert select_headers(NAT_Q, "t", NAT_HEADERS, ["x"], gw) == ["Pos"]
    gw = gw_replying(header_select="Relevant headers: ['Nation', 'Year']")
    assert select_headers(NAT_Q, "t", NAT_HEADERS, ["x"], gw) == NAT_HEADERS


def test_mapping_totality_and_coercion():
    gw = gw_replying(entity_map="{'driver': ['Racer'], 'position 4': ['pos']}")
    got = map_entities(NAT_Q, "t", ["driver", "position 4", "nationality"], ["Pos", "Driver"], gw, headers=NAT_HEADERS)
    assert got == {"driver": [OTHERS], "position 4": ["Pos"], "nationality": [OTHERS]}


def test_analyze_degrades_on_entity_failure():
    inst = make_instance([["a", "b"]], headers=["A", "B"])
    gw = gw_replying(entity_extract="no idea")
    a = analyze(inst, gw)
    assert a.entities == [] and a.relevant_headers == ["A", "B"]


@settings(max_examples=200)
@given(
    ents=st.text(max_size=60),
    heads=st.text(max_size=60),
    mapping=st.text(max_size=80),
)
def test_analyze_invariants_for_any_output(ents, heads, mapping):
    inst = make_instance([["a", "b", "c"]], headers=["Pos", "Driver", "Gap"], question="Who won?")
    gw = gw_replying(entity_extract=ents, header_select=heads, entity_map=mapping)
    a = analyze(inst, gw)
    table_heads = {normalize_text(h) for h in inst.table.headers}
    assert set(a.entity_header_map) <= set(a.entities)
    assert {normalize_text(h) for h in a.relevant_headers} <= table_heads
    if a.entities:
        assert a.relevant_headers
        assert set(a.entity_header_map) == set(a.entities)
        for targets in a.entity_header_map.values():
            assert targets
            for h in targets:
                assert h == OTHERS or normalize_text(h) in table_heads


def test_replayed_nat_analysis(gp_instance, replay_gw):
    a = analyze(gp_instance, replay_gw)
    assert a.entities == ["driver", "position 4", "2004 United States Grand Prix", "nationality"]
    assert a.relevant_headers == ["Pos", "Driver"]
    assert a.entity_header_map["position 4"] == ["Pos"]

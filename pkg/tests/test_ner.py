import pytest
from hypothesis import given, settings, strategies as st

from hygraph.corpus import Document, normalize_text
from hygraph.llm import LlmGateway
from hygraph.ner import ExternalNer, LlmNer, NerUnavailable, extract_doc_entities, make_ner, rule_entities

from helpers import CountingTransport

BUTTON = (
    "Jenson Alexander Lyons Button MBE ( born 19 January 1980 ) is a British racing driver and former "
    "Formula One driver . He won the 2009 Formula One World Championship , driving for Brawn GP ."
)


def doc(text, doc_id="d"):
    return Document(doc_id, "T", text)


def surfaces(text):
    return [e.surface for e in extract_doc_entities(doc(text))]


def test_button_passage():
    got = surfaces(BUTTON)
    for want in ["Jenson Alexander Lyons Button MBE", "19 January 1980", "British", "Formula One", "2009",
                 "Formula One World Championship", "Brawn GP"]:
        assert want in got


def test_stopwords_only():
    assert surfaces("the and of") == []


def test_duplicate_mention_once():
    got = surfaces("British drivers met British fans.")
    assert got.count("British") == 1


def test_spans_point_at_surface():
    for s, a, b in rule_entities(BUTTON):
        assert BUTTON[a:b] == s


@settings(max_examples=200)
@given(st.text(alphabet=st.sampled_from(list("AbCde 19,.Jan")) | st.characters(), max_size=80).filter(lambda s: s.strip()))
def test_idempotent_and_normalized(text):
    a = extract_doc_entities(doc(text))
    assert a == extract_doc_entities(doc(text))
    for e in a:
        assert e.normalized and e.normalized == normalize_text(e.surface)
    assert len({e.normalized for e in a}) == len(a)


def test_empty_doc_rejected():
    with pytest.raises(ValueError):
        extract_doc_entities(doc("   "))


def test_unknown_provider_named():
    with pytest.raises(NerUnavailable, match="spacy"):
        make_ner("spacy")


def test_llm_ner_parses_list():
    gw = LlmGateway(mode="live", transport=CountingTransport(lambda r: "Entities: ['British', 'Brawn GP', 'British']"))
    got = LlmNer(gw)(doc(BUTTON))
    assert [e.surface for e in got] == ["British", "Brawn GP"]
    assert got[0].span == (BUTTON.index("British"), BUTTON.index("British") + 7)


def test_external_ner_wire_format():
    seen = {}

    def post(url, payload):
        seen.update(url=url, payload=payload)
        return {"entities": [{"text": "Brawn GP", "start": 5, "end": 13}, {"text": "2009"}]}

    got = ExternalNer("http://ner.test/tag", post=post)(doc("text"))
    assert seen == {"url": "http://ner.test/tag", "payload": {"text": "text"}}
    assert [(e.surface, e.span) for e in got] == [("Brawn GP", (5, 13)), ("2009", None)]


def test_external_needs_endpoint():
    with pytest.raises(NerUnavailable, match="external_ner"):
        make_ner("external_ner")

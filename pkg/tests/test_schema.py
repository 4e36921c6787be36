"""Schema loading, normalization and validation."""

import json

import pytest

from voicebot.server.schema import (
    CodecCollision,
    DuplicateSentence,
    EmptySchema,
    ParseError,
    SendBinary,
    Synthesize,
    load_schema,
    match_sentence,
    normalize_sentence,
)
from tests.test_audio import find_colliding_pair


def entry(sentence, commands=None, ack=None):
    doc = {"sentence": sentence,
           "commands": commands or [
               {"order": 0, "delay_ms": 0,
                "action": {"type": "binary", "pin": 3, "level": 1},
                "target_serial": 7}]}
    if ack is not None:
        doc["ack"] = ack
    return doc


def schema_doc(entries):
    return json.dumps({"locale": "en", "sentences": entries})


# -- normalize ---------------------------------------------------------------

@pytest.mark.parametrize("raw,expected", [
    ("Move  Forward!", "move forward"),
    ("move forward", "move forward"),
    ("  PICK\tup ", "pick up"),
    ("TURN-LEFT", "turnleft"),
    ("Straße", "strasse"),  # casefold, not lower
    ("a  b\n\nc", "a b c"),
])
def test_normalize(raw, expected):
    assert normalize_sentence(raw) == expected


def test_normalize_idempotent():
    for raw in ["Move  Forward!", "x", "  many   words  here "]:
        once = normalize_sentence(raw)
        assert normalize_sentence(once) == once


# -- load_schema ----------------------------------------------------------------

def test_load_demo_schema(demo_schema):
    assert len(demo_schema.entries) == 20
    assert demo_schema.locale == "en"
    entry = match_sentence(demo_schema, "move forward")
    assert entry is not None
    assert entry.commands[0].action == SendBinary(3, 1)
    assert entry.ack_text == "moving forward"
    # vocabulary covers sentences, acks and synthesized speech
    assert "forward" in demo_schema.vocabulary
    assert "moving" in demo_schema.vocabulary
    assert "nominal" in demo_schema.vocabulary


def test_load_rejects_bad_json():
    with pytest.raises(ParseError):
        load_schema("{nope")


def test_load_rejects_empty():
    with pytest.raises(EmptySchema):
        load_schema(schema_doc([]))


def test_load_rejects_duplicate_sentences():
    with pytest.raises(DuplicateSentence):
        load_schema(schema_doc([entry("Move Forward"), entry("move   forward!")]))


def test_load_rejects_codec_collision():
    a, b = find_colliding_pair()
    with pytest.raises(CodecCollision) as exc:
        load_schema(schema_doc([entry(a), entry(b)]))
    assert set(exc.value.words) == {a, b}


def test_load_rejects_unknown_locale():
    with pytest.raises(ParseError):
        load_schema(json.dumps({"locale": "xx", "sentences": [entry("go")]}))


def test_load_accepts_all_seventeen_locales():
    for tag in ["ca", "zh", "da", "nl", "en", "fi", "fr", "de", "it", "ja",
                "ko", "nb", "pl", "pt", "ru", "es", "sv"]:
        schema = load_schema(json.dumps({"locale": tag,
                                         "sentences": [entry("go")]}))
        assert schema.locale == tag


def test_load_rejects_bad_pin():
    bad = entry("go", commands=[{"order": 0, "delay_ms": 0,
                                 "action": {"type": "binary", "pin": 1, "level": 1},
                                 "target_serial": 7}])
    with pytest.raises(ParseError):
        load_schema(schema_doc([bad]))


def test_load_rejects_negative_delay():
    bad = entry("go", commands=[{"order": 0, "delay_ms": -5,
                                 "action": {"type": "binary", "pin": 3, "level": 1},
                                 "target_serial": 7}])
    with pytest.raises(ParseError):
        load_schema(schema_doc([bad]))


def test_load_rejects_non_increasing_order():
    bad = entry("go", commands=[
        {"order": 1, "delay_ms": 0,
         "action": {"type": "binary", "pin": 3, "level": 1}, "target_serial": 7},
        {"order": 1, "delay_ms": 0,
         "action": {"type": "binary", "pin": 4, "level": 0}, "target_serial": 7}])
    with pytest.raises(ParseError):
        load_schema(schema_doc([bad]))


def test_load_rejects_empty_commands():
    with pytest.raises(ParseError):
        load_schema(schema_doc([{"sentence": "go", "commands": []}]))


def test_synth_action_text_normalized():
    doc = entry("go", commands=[{"order": 0, "delay_ms": 0,
                                 "action": {"type": "synth", "text": "Hello THERE!"},
                                 "target_serial": 7}])
    schema = load_schema(schema_doc([doc]))
    assert schema.entries[0].commands[0].action == Synthesize("hello there")


# -- match -----------------------------------------------------------------------

def test_match_exact(demo_schema):
    assert match_sentence(demo_schema, "turn left").commands[0].action.pin == 5


def test_match_absent_is_none(demo_schema):
    assert match_sentence(demo_schema, "dance") is None


def test_match_requires_normalized_input(demo_schema):
    assert match_sentence(demo_schema, normalize_sentence("MOVE FORWARD")) \
        is match_sentence(demo_schema, "move forward")

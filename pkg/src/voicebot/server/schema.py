"""Voice schemas: sentences mapped to ordered, delayed command sequences.

A schema document is JSON:

    {"locale": "en",
     "sentences": [
        {"sentence": "move forward",
         "ack": "moving forward",
         "commands": [
            {"order": 0, "delay_ms": 0,
             "action": {"type": "binary", "pin": 3, "level": 1},
             "target_serial": 7}]}]}

Loading normalizes every sentence, checks uniqueness, and rejects the whole
schema if any two distinct words share a codec tone triple: recognition
must never have to guess between collided words.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from voicebot.audio.codec import word_triple
from voicebot.protocol import PIN_MAX, PIN_MIN

# The 17 supported languages; metadata only, matching is locale-agnostic.
SUPPORTED_LOCALES = frozenset({
    "ca", "zh", "da", "nl", "en", "fi", "fr", "de", "it", "ja", "ko",
    "nb", "pl", "pt", "ru", "es", "sv",
})


class SchemaError(Exception):
    pass


class ParseError(SchemaError):
    pass


class EmptySchema(SchemaError):
    pass


class DuplicateSentence(SchemaError):
    pass


class CodecCollision(SchemaError):
    def __init__(self, word_a: str, word_b: str):
        super().__init__(f"words {word_a!r} and {word_b!r} share codec "
                         f"triple {word_triple(word_a)}")
        self.words = (word_a, word_b)


@dataclass(frozen=True)
class SendBinary:
    pin: int
    level: int


@dataclass(frozen=True)
class SendText:
    text: str


@dataclass(frozen=True)
class Synthesize:
    text: str


CommandAction = Union[SendBinary, SendText, Synthesize]


@dataclass(frozen=True)
class CommandSpec:
    order: int
    delay_ms: int  # relative to the previous command's fire time
    action: CommandAction
    target_serial: int


@dataclass(frozen=True)
class SentenceEntry:
    sentence: str  # normalized
    commands: tuple[CommandSpec, ...]
    ack_text: Optional[str] = None


@dataclass
class VoiceSchema:
    locale: str
    entries: tuple[SentenceEntry, ...]
    vocabulary: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.vocabulary:
            self.vocabulary = frozenset(_schema_words(self.entries))


def normalize_sentence(text: str) -> str:
    """Case-fold, collapse whitespace runs, strip, and drop everything that
    is not a letter, digit or space."""
    kept = []
    for ch in text.casefold():
        if ch.isspace():
            kept.append(" ")
        elif ch.isalnum():
            kept.append(ch)
    return " ".join("".join(kept).split())


def _schema_words(entries) -> set[str]:
    words: set[str] = set()
    for entry in entries:
        words.update(entry.sentence.split())
        if entry.ack_text:
            words.update(entry.ack_text.split())
        for cmd in entry.commands:
            if isinstance(cmd.action, Synthesize):
                words.update(cmd.action.text.split())
    return words


def _require(doc: dict, key: str, types, where: str):
    if key not in doc:
        raise ParseError(f"{where}: missing {key!r}")
    value = doc[key]
    if not isinstance(value, types):
        raise ParseError(f"{where}: {key!r} has wrong type {type(value).__name__}")
    return value


def _parse_action(doc: dict, where: str) -> CommandAction:
    kind = _require(doc, "type", str, where)
    if kind == "binary":
        pin = _require(doc, "pin", int, where)
        level = _require(doc, "level", int, where)
        if not PIN_MIN <= pin <= PIN_MAX:
            raise ParseError(f"{where}: pin {pin} outside {PIN_MIN}..{PIN_MAX}")
        if level not in (0, 1):
            raise ParseError(f"{where}: level {level} not 0 or 1")
        return SendBinary(pin, level)
    if kind == "text":
        return SendText(_require(doc, "text", str, where))
    if kind == "synth":
        text = normalize_sentence(_require(doc, "text", str, where))
        if not text:
            raise ParseError(f"{where}: synth text is empty after normalization")
        return Synthesize(text)
    raise ParseError(f"{where}: unknown action type {kind!r}")


def load_schema(document: Union[str, bytes, dict]) -> VoiceSchema:
    """Parse, normalize and validate a schema document (JSON text or an
    already-parsed object)."""
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")

    locale = _require(doc, "locale", str, "schema")
    if locale not in SUPPORTED_LOCALES:
        raise ParseError(f"locale {locale!r} not one of the supported tags "
                         f"{sorted(SUPPORTED_LOCALES)}")
    raw_sentences = _require(doc, "sentences", list, "schema")
    if not raw_sentences:
        raise EmptySchema("schema has no sentences")

    entries: list[SentenceEntry] = []
    seen: dict[str, str] = {}
    for i, raw in enumerate(raw_sentences):
        where = f"sentences[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{where}: must be an object")
        sentence = normalize_sentence(_require(raw, "sentence", str, where))
        if not sentence:
            raise ParseError(f"{where}: sentence is empty after normalization")
        if sentence in seen:
            raise DuplicateSentence(
                f"{raw['sentence']!r} and {seen[sentence]!r} both normalize "
                f"to {sentence!r}")
        seen[sentence] = raw["sentence"]

        raw_commands = _require(raw, "commands", list, where)
        if not raw_commands:
            raise ParseError(f"{where}: commands must be non-empty")
        commands: list[CommandSpec] = []
        last_order = None
        for j, raw_cmd in enumerate(raw_commands):
            cwhere = f"{where}.commands[{j}]"
            if not isinstance(raw_cmd, dict):
                raise ParseError(f"{cwhere}: must be an object")
            order = _require(raw_cmd, "order", int, cwhere)
            if last_order is not None and order <= last_order:
                raise ParseError(f"{cwhere}: order {order} not strictly "
                                 f"increasing after {last_order}")
            last_order = order
            delay = _require(raw_cmd, "delay_ms", int, cwhere)
            if delay < 0:
                raise ParseError(f"{cwhere}: delay_ms {delay} is negative")
            action = _parse_action(_require(raw_cmd, "action", dict, cwhere), cwhere)
            target = _require(raw_cmd, "target_serial", int, cwhere)
            commands.append(CommandSpec(order, delay, action, target))

        ack = raw.get("ack")
        if ack is not None:
            if not isinstance(ack, str):
                raise ParseError(f"{where}: ack must be a string")
            ack = normalize_sentence(ack)
            if not ack:
                raise ParseError(f"{where}: ack is empty after normalization")
        entries.append(SentenceEntry(sentence, tuple(commands), ack))

    words = sorted(_schema_words(entries))
    triples: dict[tuple[int, int, int], str] = {}
    for word in words:
        triple = word_triple(word)
        if triple in triples:
            raise CodecCollision(triples[triple], word)
        triples[triple] = word

    return VoiceSchema(locale, tuple(entries))


def load_schema_file(path) -> VoiceSchema:
    with open(path, "r", encoding="utf-8") as fh:
        return load_schema(fh.read())


def match_sentence(schema: VoiceSchema, text: str) -> Optional[SentenceEntry]:
    """Exact match of a normalized sentence; no fuzzy matching, absence is
    simply no match."""
    for entry in schema.entries:
        if entry.sentence == text:
            return entry
    return None

"""The speech-automation server: schema store, device registry with one
exclusive recognition engine per input device, and the timed command
dispatcher with speech acknowledgements."""

from voicebot.server.schema import (
    CommandSpec,
    SchemaError,
    CodecCollision,
    DuplicateSentence,
    EmptySchema,
    ParseError,
    SendBinary,
    SendText,
    SentenceEntry,
    Synthesize,
    SUPPORTED_LOCALES,
    VoiceSchema,
    load_schema,
    load_schema_file,
    match_sentence,
    normalize_sentence,
)
from voicebot.server.registry import (
    DeviceDescriptor,
    DuplicateSerial,
    RegistryError,
    Session,
    Registry,
    UnsupportedVersion,
)
from voicebot.server.core import (
    CONSOLE_SERIAL,
    ProtocolViolation,
    ServerCore,
    schedule_commands,
    synthesize_ack,
)
from voicebot.server.trace import Trace, MalformedTrace, read_trace

__all__ = [
    "CommandSpec", "SchemaError", "CodecCollision", "DuplicateSentence",
    "EmptySchema", "ParseError", "SendBinary", "SendText", "SentenceEntry",
    "Synthesize", "SUPPORTED_LOCALES", "VoiceSchema", "load_schema",
    "load_schema_file", "match_sentence", "normalize_sentence",
    "DeviceDescriptor", "DuplicateSerial", "RegistryError", "Session",
    "Registry", "UnsupportedVersion",
    "CONSOLE_SERIAL", "ProtocolViolation", "ServerCore", "schedule_commands",
    "synthesize_ack",
    "Trace", "MalformedTrace", "read_trace",
]

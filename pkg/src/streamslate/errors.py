"""Exception hierarchy shared by every streamslate module."""

from __future__ import annotations


class StreamslateError(Exception):
    """Base class. ``utterance_id`` is filled in by the runner when known."""

    utterance_id: str | None = None

    def with_utterance(self, utterance_id: str) -> "StreamslateError":
        if self.utterance_id is None:
            self.utterance_id = utterance_id
            self.args = (f"[utterance {utterance_id}] {self.args[0] if self.args else ''}",)
        return self


class ValidationError(StreamslateError, ValueError):
    pass


class EmptySegments(ValidationError):
    pass


class NonPositiveDuration(ValidationError):
    pass


class TimelineOutOfRange(ValidationError):
    pass


class InvalidToken(ValidationError):
    pass


class InvalidBeam(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class EmptyCollection(ValidationError):
    pass


class EngineError(StreamslateError):
    pass


class Overrun(EngineError):
    pass


class PushAfterFinish(EngineError):
    pass


class SessionFinalized(EngineError):
    pass


class SourceNotFinished(EngineError):
    pass


class DecoderViolation(EngineError):
    """A decoder returned a beam that breaks the forced-prefix contract."""


class DecoderError(StreamslateError):
    pass


class MissingTimeline(DecoderError):
    pass


class MissingScriptEntry(DecoderError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


class BridgeError(DecoderError):
    pass


class PeerExited(BridgeError):
    pass


class ProtocolError(BridgeError):
    pass


class BridgeTimeout(BridgeError, TimeoutError):
    pass


class MetricError(StreamslateError, ValueError):
    pass


class ZeroLength(MetricError):
    pass


class EmptyHypothesis(MetricError):
    pass


class LengthMismatch(MetricError):
    pass


class HarnessError(StreamslateError):
    pass


class ParseError(HarnessError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class DuplicateId(HarnessError, ValueError):
    pass


class EmptyGrid(HarnessError, ValueError):
    pass

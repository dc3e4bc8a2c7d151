"""Domain types: tokens, utterances, beams, commit logs and agent actions.

All time values are integer milliseconds.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    EmptySegments,
    InvalidBeam,
    InvalidToken,
    NonPositiveDuration,
    TimelineOutOfRange,
    ValidationError,
)

EOS_TEXT = "</s>"


@dataclass(frozen=True)
class Token:
    text: str
    is_eos: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.text, str) or not self.text:
            raise InvalidToken(f"token text must be a non-empty string, got {self.text!r}")

    def __str__(self) -> str:
        return self.text


EOS = Token(EOS_TEXT, is_eos=True)


def tokens(texts: Iterable[str]) -> tuple[Token, ...]:
    """Build a plain (non-EOS) token tuple from surface strings."""
    return tuple(Token(t) for t in texts)


def texts(seq: Iterable[Token]) -> tuple[str, ...]:
    return tuple(t.text for t in seq)


def strip_eos_tokens(seq: Sequence[Token]) -> tuple[Token, ...]:
    return tuple(t for t in seq if not t.is_eos)


def _check_eos_last(seq: Sequence[Token]) -> None:
    for i, tok in enumerate(seq):
        if tok.is_eos and i != len(seq) - 1:
            raise InvalidToken("EOS may only appear as the last token")


@dataclass(frozen=True)
class Utterance:
    id: str
    segments_ms: tuple[int, ...]
    reference: tuple[Token, ...]
    timeline: tuple[tuple[int, Token], ...] | None = None

    @property
    def total_ms(self) -> int:
        return sum(self.segments_ms)

    @property
    def timeline_tokens(self) -> tuple[Token, ...]:
        return tuple(tok for _, tok in self.timeline or ())


def validate_utterance(u: Utterance) -> Utterance:
    if not u.segments_ms:
        raise EmptySegments(f"utterance {u.id!r} has no audio segments")
    for t in u.segments_ms:
        if not isinstance(t, int) or isinstance(t, bool) or t <= 0:
            raise NonPositiveDuration(f"utterance {u.id!r}: segment duration {t!r} is not a positive integer")
    if any(tok.is_eos for tok in u.reference):
        raise InvalidToken(f"utterance {u.id!r}: reference must not contain EOS")
    if u.timeline is not None:
        total = u.total_ms
        prev = 0
        for reveal, tok in u.timeline:
            if reveal < 0 or reveal > total:
                raise TimelineOutOfRange(
                    f"utterance {u.id!r}: reveal time {reveal} outside [0, {total}]"
                )
            if reveal < prev:
                raise TimelineOutOfRange(f"utterance {u.id!r}: reveal times must be non-decreasing")
            prev = reveal
    return u


@dataclass(frozen=True)
class Hypothesis:
    tokens: tuple[Token, ...]
    score: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        _check_eos_last(self.tokens)

    @property
    def has_eos(self) -> bool:
        return bool(self.tokens) and self.tokens[-1].is_eos

    def strip_eos(self) -> "Hypothesis":
        if self.has_eos:
            return Hypothesis(self.tokens[:-1], self.score)
        return self


def strip_eos(h: Hypothesis) -> Hypothesis:
    return h.strip_eos()


def _rank_key(h: Hypothesis) -> tuple[float, tuple[str, ...]]:
    return (-h.score, texts(h.tokens))


@dataclass(frozen=True)
class Beam:
    """Ranked hypotheses from one decode call, best first.

    Items are re-sorted on construction: score descending, ties broken by
    the lexicographic order of token texts.
    """

    items: tuple[Hypothesis, ...]
    size: int

    def __post_init__(self) -> None:
        items = tuple(sorted(self.items, key=_rank_key))
        if self.size < 1:
            raise InvalidBeam(f"beam size must be >= 1, got {self.size}")
        if not 1 <= len(items) <= self.size:
            raise InvalidBeam(f"beam must hold 1..{self.size} hypotheses, got {len(items)}")
        object.__setattr__(self, "items", items)

    @property
    def best(self) -> Hypothesis:
        return self.items[0]


@dataclass(frozen=True)
class CommitEntry:
    token: Token
    delay_ms: int
    chunk_index: int


@dataclass
class CommitLog:
    """Append-only record of committed tokens and the audio read when each was committed."""

    _entries: list[CommitEntry] = field(default_factory=list)

    @property
    def entries(self) -> tuple[CommitEntry, ...]:
        return tuple(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def append(self, token: Token, delay_ms: int, chunk_index: int) -> None:
        if token.is_eos:
            raise ValidationError("EOS is never committed")
        if self._entries:
            last = self._entries[-1]
            if delay_ms < last.delay_ms or chunk_index < last.chunk_index:
                raise ValidationError("commit delays and chunk indices must be non-decreasing")
        self._entries.append(CommitEntry(token, delay_ms, chunk_index))

    def extend(self, toks: Iterable[Token], delay_ms: int, chunk_index: int) -> None:
        for tok in toks:
            self.append(tok, delay_ms, chunk_index)

    @property
    def tokens(self) -> tuple[Token, ...]:
        return tuple(e.token for e in self._entries)

    @property
    def delays_ms(self) -> list[int]:
        return [e.delay_ms for e in self._entries]

    def to_json(self) -> str:
        return json.dumps(
            [[e.token.text, e.delay_ms, e.chunk_index] for e in self._entries],
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, payload: str) -> "CommitLog":
        log = cls()
        for text, delay, chunk in json.loads(payload):
            log.append(Token(text), int(delay), int(chunk))
        return log


class ActionKind(enum.Enum):
    READ = "READ"
    WRITE = "WRITE"


@dataclass(frozen=True)
class AgentAction:
    kind: ActionKind
    payload: tuple[Token, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "payload", tuple(self.payload))
        if self.kind is ActionKind.WRITE and not self.payload:
            raise ValidationError("WRITE action needs a non-empty payload")
        if self.kind is ActionKind.READ and self.payload:
            raise ValidationError("READ action carries no payload")


READ = AgentAction(ActionKind.READ)


def write(payload: Sequence[Token]) -> AgentAction:
    return AgentAction(ActionKind.WRITE, tuple(payload))


def _fixed(x: float) -> float:
    return round(float(x), 4)


@dataclass(frozen=True)
class UtteranceRecord:
    id: str
    prediction: tuple[str, ...]
    delays_ms: tuple[int, ...]
    pre_flush_commits: int
    total_ms: int
    ref_len: int
    al_ms: float
    al_corrected_ms: float
    ap: float
    dal_ms: float
    commit_error_rate: float
    # reserved for computation-aware latency; never filled by the simulators
    wall_clock_ms: float | None = None

    def __post_init__(self) -> None:
        if len(self.delays_ms) != len(self.prediction):
            raise ValidationError(f"utterance {self.id!r}: delays and prediction lengths differ")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "prediction": list(self.prediction),
            "delays_ms": list(self.delays_ms),
            "pre_flush_commits": self.pre_flush_commits,
            "total_ms": self.total_ms,
            "ref_len": self.ref_len,
            "al_ms": _fixed(self.al_ms),
            "al_corrected_ms": _fixed(self.al_corrected_ms),
            "ap": _fixed(self.ap),
            "dal_ms": _fixed(self.dal_ms),
            "commit_error_rate": _fixed(self.commit_error_rate),
            "wall_clock_ms": self.wall_clock_ms,
        }


@dataclass(frozen=True)
class CorpusMetrics:
    bleu: float
    al_ms: float
    al_corrected_ms: float
    ap: float
    dal_ms: float
    commit_error_rate: float

    def to_dict(self) -> dict:
        return {k: _fixed(getattr(self, k)) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class RunReport:
    config: dict
    corpus: CorpusMetrics
    utterances: tuple[UtteranceRecord, ...]

    def to_dict(self) -> dict:
        return {
            "config": dict(self.config),
            "corpus": self.corpus.to_dict(),
            "utterances": [u.to_dict() for u in self.utterances],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

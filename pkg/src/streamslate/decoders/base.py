"""The incremental decoder contract and the JSON form of beams."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Protocol, runtime_checkable

from ..core import EOS, Beam, Hypothesis, Token, texts, tokens
from ..errors import InvalidBeam, InvalidToken, ValidationError


@dataclass(frozen=True)
class DecodeRequest:
    utterance_id: str
    audio_prefix_ms: int
    forced: tuple[Token, ...]
    beam_size: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "forced", tuple(self.forced))
        if self.audio_prefix_ms <= 0:
            raise ValidationError(f"audio prefix must be positive, got {self.audio_prefix_ms}")
        if self.beam_size < 1:
            raise ValidationError(f"beam size must be >= 1, got {self.beam_size}")


@runtime_checkable
class Decoder(Protocol):
    """Anything that maps a decode request to a beam.

    Every returned hypothesis must start with ``req.forced``; the engine
    rejects beams that do not.
    """

    def decode(self, req: DecodeRequest) -> Beam: ...


def hypothesis_to_wire(h: Hypothesis) -> dict[str, Any]:
    body = h.tokens[:-1] if h.has_eos else h.tokens
    return {"tokens": list(texts(body)), "score": h.score, "eos": h.has_eos}


def hypothesis_from_wire(obj: Any) -> Hypothesis:
    if not isinstance(obj, dict):
        raise ValidationError(f"hypothesis must be an object, got {type(obj).__name__}")
    try:
        toks = obj["tokens"]
        score = obj.get("score", 0.0)
        eos = obj.get("eos", False)
    except KeyError as exc:
        raise ValidationError(f"hypothesis is missing field {exc}") from None
    if not isinstance(toks, list) or not all(isinstance(t, str) for t in toks):
        raise ValidationError("hypothesis tokens must be a list of strings")
    if not isinstance(score, (int, float)) or isinstance(score, bool):
        raise ValidationError("hypothesis score must be a number")
    if not isinstance(eos, bool):
        raise ValidationError("hypothesis eos must be a boolean")
    try:
        body = tokens(toks)
    except InvalidToken as exc:
        raise ValidationError(str(exc)) from None
    return Hypothesis(body + ((EOS,) if eos else ()), float(score))


def beam_to_wire(beam: Beam) -> list[dict[str, Any]]:
    return [hypothesis_to_wire(h) for h in beam.items]


def beam_from_wire(items: Any, size: int | None = None) -> Beam:
    """Parse a ``beams`` list. Without ``size`` the bound is the item count."""
    if not isinstance(items, list) or not items:
        raise ValidationError("beams must be a non-empty list")
    hyps = tuple(hypothesis_from_wire(o) for o in items)
    try:
        return Beam(hyps, size if size is not None else len(hyps))
    except InvalidBeam as exc:
        raise ValidationError(str(exc)) from None

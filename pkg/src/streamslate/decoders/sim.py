"""Deterministic stand-in for a neural decoder, driven by utterance timelines.

The best hypothesis is the truth revealed so far plus ``tail_len`` guess
tokens. The guesses model acoustic uncertainty at the end of a chunk: they
are drawn from a generator keyed by (seed, utterance id, audio prefix), so
two different prefixes almost never agree on them, and they vanish once the
whole source is visible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping

from ..core import EOS, Beam, Hypothesis, Token, Utterance
from ..errors import ConfigError, MissingTimeline, ValidationError
from .base import DecodeRequest

GUESS_RANGE = 10**9


def guess_token(k: int) -> Token:
    return Token(f"⟨g:{k}⟩")


def is_guess(tok: Token) -> bool:
    return tok.text.startswith("⟨g:") and tok.text.endswith("⟩")


@dataclass(frozen=True)
class SimDecoderConfig:
    tail_len: int = 2
    seed: int = 7
    beam_jitter: int = 3

    def __post_init__(self) -> None:
        if self.tail_len < 0:
            raise ConfigError(f"tail_len must be >= 0, got {self.tail_len}")
        if self.beam_jitter < 0:
            raise ConfigError(f"beam_jitter must be >= 0, got {self.beam_jitter}")


def guess_tails(cfg: SimDecoderConfig, utterance_id: str, prefix_ms: int, count: int) -> list[tuple[Token, ...]]:
    """``count`` guess tails of length ``cfg.tail_len`` for one (utterance, prefix) key."""
    rng = random.Random(f"{cfg.seed}|{utterance_id}|{prefix_ms}")
    return [
        tuple(guess_token(rng.randrange(GUESS_RANGE)) for _ in range(cfg.tail_len))
        for _ in range(count)
    ]


def sim_decode(cfg: SimDecoderConfig, u: Utterance, req: DecodeRequest) -> Beam:
    if u.timeline is None:
        raise MissingTimeline(f"utterance {u.id!r} has no timeline")
    total = u.total_ms
    if req.audio_prefix_ms > total:
        raise ValidationError(f"audio prefix {req.audio_prefix_ms} exceeds utterance length {total}")

    truth = tuple(tok for reveal, tok in u.timeline if reveal <= req.audio_prefix_ms)
    full_view = req.audio_prefix_ms >= total
    n_items = min(req.beam_size, 1 + cfg.beam_jitter)
    if full_view or cfg.tail_len == 0:
        tails: list[tuple[Token, ...]] = [()]
    else:
        tails = guess_tails(cfg, u.id, req.audio_prefix_ms, n_items)
    done = len(truth) == len(u.timeline) and not tails[0]

    forced = req.forced
    items = []
    for rank, tail in enumerate(tails):
        base = truth + tail
        # the forced prefix wins over whatever the simulator would have said there
        toks = forced + base[len(forced):]
        if done:
            toks += (EOS,)
        items.append(Hypothesis(toks, float(-rank)))
    return Beam(tuple(items), req.beam_size)


class SimDecoder:
    """Decoder over a fixed set of utterances that carry timelines."""

    thread_safe = True
    name = "sim"

    def __init__(self, utterances: Iterable[Utterance] | Mapping[str, Utterance], cfg: SimDecoderConfig | None = None):
        if isinstance(utterances, Mapping):
            self._utts = dict(utterances)
        else:
            self._utts = {u.id: u for u in utterances}
        self.cfg = cfg or SimDecoderConfig()

    @property
    def seed(self) -> int:
        return self.cfg.seed

    def decode(self, req: DecodeRequest) -> Beam:
        try:
            u = self._utts[req.utterance_id]
        except KeyError:
            raise MissingTimeline(f"unknown utterance {req.utterance_id!r}") from None
        return sim_decode(self.cfg, u, req)

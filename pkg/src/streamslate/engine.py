"""Chunked incremental decoding with stable-prefix commitment.

A :class:`Session` turns any offline decoder into a streaming one. Audio
arrives through :meth:`Session.push_audio`; every time a full chunk is
buffered, :meth:`Session.step` re-decodes the whole visible prefix with the
committed tokens forced, runs the stability strategy, and commits whatever
newly became stable. Committed tokens are never revised. Once the source is
exhausted, :meth:`Session.finalize` decodes the full input one last time and
commits the rest of the best hypothesis.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import READ, AgentAction, Beam, CommitLog, Token, Utterance, strip_eos_tokens, texts, validate_utterance, write
from .decoders.base import DecodeRequest, Decoder
from .errors import (
    ConfigError,
    DecoderViolation,
    Overrun,
    PushAfterFinish,
    SessionFinalized,
    SourceNotFinished,
)
from .stability import DecodeHistory, Strategy, check_strategy_n, stable_prefix, window_size


@dataclass(frozen=True)
class EngineConfig:
    """Streaming policy parameters.

    A chunk is decoded as soon as ``unread >= threshold`` (non-strict), where
    the threshold is ``max(chunk_ms, initial_wait_ms)`` for the first chunk
    and ``chunk_ms`` afterwards.
    """

    chunk_ms: int
    strategy: Strategy = Strategy.LA
    n: int = 2
    initial_wait_ms: int = 0
    beam_size: int = 4

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        if not isinstance(self.chunk_ms, int) or self.chunk_ms <= 0:
            raise ConfigError(f"chunk_ms must be a positive integer, got {self.chunk_ms!r}")
        if not isinstance(self.initial_wait_ms, int) or self.initial_wait_ms < 0:
            raise ConfigError(f"initial_wait_ms must be a non-negative integer, got {self.initial_wait_ms!r}")
        if not isinstance(self.beam_size, int) or self.beam_size < 1:
            raise ConfigError(f"beam size must be a positive integer, got {self.beam_size!r}")
        check_strategy_n(self.strategy, self.n)

    @property
    def first_threshold_ms(self) -> int:
        return max(self.chunk_ms, self.initial_wait_ms)


class Session:
    """Engine state for one utterance. Single-threaded."""

    def __init__(self, cfg: EngineConfig, utterance: Utterance, decoder: Decoder):
        validate_utterance(utterance)
        self.cfg = cfg
        self.utterance = utterance
        self.decoder = decoder
        self.total_ms = utterance.total_ms
        self.read_ms = 0
        self.unread_ms = 0
        self.arrived_ms = 0
        self.history = DecodeHistory(keep=window_size(cfg.strategy, cfg.n))
        self.log = CommitLog()
        self.pre_flush_commits = 0
        self.decode_calls = 0
        self.source_finished = False
        self.finalized = False

    @property
    def c(self) -> int:
        return self.history.c

    @property
    def threshold_ms(self) -> int:
        return self.cfg.first_threshold_ms if self.c == 0 else self.cfg.chunk_ms

    @property
    def committed(self) -> tuple[Token, ...]:
        return self.log.tokens

    def push_audio(self, ms: int) -> None:
        if self.finalized or self.source_finished:
            raise PushAfterFinish(f"utterance {self.utterance.id!r}: source already finished")
        if not isinstance(ms, int) or ms <= 0:
            raise ValueError(f"pushed duration must be a positive integer, got {ms!r}")
        if self.arrived_ms + ms > self.total_ms:
            raise Overrun(
                f"utterance {self.utterance.id!r}: pushing {ms} ms would exceed {self.total_ms} ms "
                f"({self.arrived_ms} ms already arrived)"
            )
        self.arrived_ms += ms
        self.unread_ms += ms
        if self.arrived_ms == self.total_ms:
            self.source_finished = True

    def _decode(self) -> Beam:
        forced = self.committed
        beam = self.decoder.decode(
            DecodeRequest(self.utterance.id, self.read_ms, forced, self.cfg.beam_size)
        )
        self.decode_calls += 1
        if len(beam.items) > self.cfg.beam_size:
            raise DecoderViolation(
                f"decoder returned {len(beam.items)} hypotheses for beam size {self.cfg.beam_size}"
            )
        want = texts(forced)
        for h in beam.items:
            if texts(h.tokens[: len(forced)]) != want or any(t.is_eos for t in h.tokens[: len(forced)]):
                raise DecoderViolation(
                    f"utterance {self.utterance.id!r} at {self.read_ms} ms: hypothesis "
                    f"{list(texts(h.tokens))} does not extend the committed prefix {list(want)}"
                )
        return beam

    def _consume(self, ms: int) -> None:
        self.unread_ms -= ms
        self.read_ms += ms

    def step(self) -> AgentAction:
        if self.finalized:
            raise SessionFinalized(f"utterance {self.utterance.id!r} is already finalized")
        threshold = self.threshold_ms
        if self.unread_ms >= threshold:
            self._consume(threshold)
        elif self.source_finished and self.unread_ms > 0:
            self._consume(self.unread_ms)
        else:
            return READ

        self.history.append(self._decode())
        # stability functions drop EOS themselves, so an early EOS never ends the stream
        stable = stable_prefix(self.cfg.strategy, self.cfg.n, self.history)
        done = len(self.log)
        if len(stable) <= done:
            return READ
        new = stable[done:]
        self.log.extend(new, self.read_ms, self.c)
        self.pre_flush_commits += len(new)
        return write(new)

    def finalize(self) -> tuple[tuple[Token, ...], list[int]]:
        """Flush: decode the full input and commit the rest of the best hypothesis."""
        if self.finalized:
            raise SessionFinalized(f"utterance {self.utterance.id!r} is already finalized")
        if not self.source_finished:
            raise SourceNotFinished(f"utterance {self.utterance.id!r}: source still has unread audio")
        self._consume(self.unread_ms)
        beam = self._decode()
        self.history.append(beam)
        final = strip_eos_tokens(beam.best.tokens)
        self.log.extend(final[len(self.log):], self.total_ms, self.c)
        self.finalized = True
        return self.log.tokens, self.log.delays_ms


def new_session(cfg: EngineConfig, u: Utterance, decoder: Decoder) -> Session:
    return Session(cfg, u, decoder)

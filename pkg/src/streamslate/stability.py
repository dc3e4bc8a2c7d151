"""Stable-prefix selection over the decode history.

Three strategies decide which part of the current hypotheses is safe to
commit:

* hold-n: the best hypothesis minus its last ``n`` tokens;
* local agreement (LA-n): the longest common prefix of the best
  hypotheses of the last ``n`` chunks;
* shared prefix (SP-n): the longest common prefix of every beam item of
  the last ``n`` chunks.

EOS tokens are dropped before any comparison and tokens compare by text.
"""

from __future__ import annotations

import enum
from collections import deque
from typing import Iterable, Sequence

from .core import Beam, Token, strip_eos_tokens
from .errors import ConfigError, EmptyCollection


class Strategy(enum.Enum):
    HOLD = "hold"
    LA = "la"
    SP = "sp"

    @classmethod
    def parse(cls, value: "str | Strategy") -> "Strategy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigError(f"unknown strategy {value!r}; expected one of hold, la, sp") from None


MIN_N = {Strategy.HOLD: 0, Strategy.LA: 2, Strategy.SP: 1}


def check_strategy_n(strategy: Strategy, n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < MIN_N[strategy]:
        raise ConfigError(f"{strategy.value} requires n >= {MIN_N[strategy]}, got {n!r}")


def window_size(strategy: Strategy, n: int) -> int:
    """Number of most recent beams a strategy looks at."""
    return 1 if strategy is Strategy.HOLD else n


class DecodeHistory:
    """Beams of chunks 1..c, of which only the newest ``keep`` are retained.

    Chunk indices are implicit: the k-th appended beam belongs to chunk k.
    """

    def __init__(self, keep: int | None = None):
        if keep is not None and keep < 1:
            raise ValueError("keep must be >= 1")
        self._beams: deque[Beam] = deque(maxlen=keep)
        self._count = 0

    @classmethod
    def of(cls, beams: Iterable[Beam], keep: int | None = None) -> "DecodeHistory":
        h = cls(keep)
        for b in beams:
            h.append(b)
        return h

    def append(self, beam: Beam) -> None:
        self._beams.append(beam)
        self._count += 1

    @property
    def c(self) -> int:
        """Index of the current (latest) chunk; 0 when empty."""
        return self._count

    def __len__(self) -> int:
        return self._count

    @property
    def current(self) -> Beam:
        if not self._beams:
            raise EmptyCollection("decode history is empty")
        return self._beams[-1]

    def records(self) -> list[tuple[int, Beam]]:
        first = self._count - len(self._beams) + 1
        return list(enumerate(self._beams, start=first))

    def window(self, n: int) -> list[Beam]:
        """Beams of chunks c-n+1..c (requires c >= n)."""
        if n > len(self._beams):
            raise ValueError(f"window of {n} exceeds the {len(self._beams)} retained beams")
        return list(self._beams)[len(self._beams) - n:]


def lcp(seqs: Iterable[Sequence[Token]]) -> tuple[Token, ...]:
    """Longest common prefix by token text; EOS flags are ignored.

    The returned tokens are taken from the first sequence.
    """
    seqs = [tuple(s) for s in seqs]
    if not seqs:
        raise EmptyCollection("lcp of an empty collection")
    first = seqs[0]
    end = min(len(s) for s in seqs)
    for i in range(end):
        text = first[i].text
        if any(s[i].text != text for s in seqs[1:]):
            return first[:i]
    return first[:end]


def hold_n(beam: Beam, n: int) -> tuple[Token, ...]:
    best = strip_eos_tokens(beam.best.tokens)
    return best[: max(0, len(best) - n)]


def la_n(history: DecodeHistory, n: int) -> tuple[Token, ...]:
    if history.c < n:
        return ()
    return lcp(strip_eos_tokens(b.best.tokens) for b in reversed(history.window(n)))


def sp_n(history: DecodeHistory, n: int) -> tuple[Token, ...]:
    if history.c < n:
        return ()
    # newest beam first so the returned tokens come from the current best
    return lcp(
        strip_eos_tokens(h.tokens) for b in reversed(history.window(n)) for h in b.items
    )


def stable_prefix(strategy: Strategy, n: int, history: DecodeHistory) -> tuple[Token, ...]:
    if strategy is Strategy.HOLD:
        return hold_n(history.current, n)
    if strategy is Strategy.LA:
        return la_n(history, n)
    return sp_n(history, n)

"""Quality and latency metrics for simultaneous translation.

Latency metrics take per-token delays: the milliseconds of source audio
that had been read when each output token was committed.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyHypothesis, LengthMismatch, ValidationError, ZeroLength


@dataclass(frozen=True)
class LatencyInput:
    delays_ms: tuple[float, ...]
    total_ms: float
    ref_len: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "delays_ms", tuple(self.delays_ms))
        if not self.delays_ms:
            raise EmptyHypothesis("latency needs at least one emitted token")
        if self.total_ms <= 0:
            raise ValidationError(f"source duration must be positive, got {self.total_ms}")
        prev = 0
        for d in self.delays_ms:
            if not 0 < d <= self.total_ms:
                raise ValidationError(f"delay {d} outside (0, {self.total_ms}]")
            if d < prev:
                raise ValidationError("delays must be non-decreasing")
            prev = d
        if self.ref_len < 0:
            raise ValidationError("reference length must be non-negative")

    @property
    def hyp_len(self) -> int:
        return len(self.delays_ms)


def ideal_delays(total_ms: float, length: int, count: int | None = None) -> list[float]:
    """Delays of a policy that spreads ``length`` tokens evenly over the source.

    Returns ``count`` values (default ``length``); the i-th (1-based) is
    ``(i - 1) * total_ms / length``.
    """
    if length <= 0:
        raise ZeroLength(f"ideal delays need a positive length, got {length}")
    if total_ms <= 0:
        raise ValidationError(f"source duration must be positive, got {total_ms}")
    count = length if count is None else count
    return [i * total_ms / length for i in range(count)]


def _tau(inp: LatencyInput) -> int:
    # first token emitted with the whole source read; all tokens if none was
    for i, d in enumerate(inp.delays_ms, start=1):
        if d == inp.total_ms:
            return i
    return inp.hyp_len


def average_lagging(inp: LatencyInput, corrected: bool = False) -> float:
    """Average lagging for speech input.

    The ideal policy is normalised by the reference length, or by
    ``max(|hyp|, |ref|)`` when ``corrected``; the latter keeps over-long
    hypotheses from earning negative lag.
    """
    length = max(inp.hyp_len, inp.ref_len) if corrected else inp.ref_len
    tau = _tau(inp)
    ideal = ideal_delays(inp.total_ms, length, tau)
    return math.fsum(d - o for d, o in zip(inp.delays_ms[:tau], ideal)) / tau


def average_proportion(inp: LatencyInput) -> float:
    return math.fsum(inp.delays_ms) / (inp.hyp_len * inp.total_ms)


def dal(inp: LatencyInput) -> float:
    """Differentiable average lagging, with the token rate taken from the reference length."""
    if inp.ref_len <= 0:
        raise ZeroLength("DAL needs a non-empty reference")
    r = inp.total_ms / inp.ref_len
    total = 0.0
    prev = None
    for i, d in enumerate(inp.delays_ms):
        cur = d if prev is None else max(d, prev + r)
        total += cur - i * r
        prev = cur
    return total / inp.hyp_len


def _ngrams(seq: Sequence[str], n: int) -> Counter:
    return Counter(tuple(seq[i:i + n]) for i in range(len(seq) - n + 1))


@dataclass(frozen=True)
class BleuStats:
    matches: tuple[int, ...]
    totals: tuple[int, ...]
    hyp_len: int
    ref_len: int

    @property
    def precisions(self) -> list[float]:
        return [m / t if t else 0.0 for m, t in zip(self.matches, self.totals)]

    @property
    def brevity_penalty(self) -> float:
        if self.hyp_len == 0:
            return 0.0
        if self.hyp_len > self.ref_len:
            return 1.0
        return math.exp(1 - self.ref_len / self.hyp_len)

    @property
    def score(self) -> float:
        if any(m == 0 for m in self.matches):
            return 0.0
        log_p = math.fsum(math.log(m / t) for m, t in zip(self.matches, self.totals)) / len(self.matches)
        return 100.0 * self.brevity_penalty * math.exp(log_p)


def bleu_stats(hyps: Sequence[Sequence[str]], refs: Sequence[Sequence[str]], max_order: int = 4) -> BleuStats:
    if len(hyps) != len(refs):
        raise LengthMismatch(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise LengthMismatch("BLEU needs at least one sentence pair")
    matches = [0] * max_order
    totals = [0] * max_order
    hyp_len = ref_len = 0
    for hyp, ref in zip(hyps, refs):
        hyp, ref = list(hyp), list(ref)
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_order + 1):
            h = _ngrams(hyp, n)
            r = _ngrams(ref, n)
            matches[n - 1] += sum(min(c, r[g]) for g, c in h.items())
            totals[n - 1] += max(len(hyp) - n + 1, 0)
    return BleuStats(tuple(matches), tuple(totals), hyp_len, ref_len)


def bleu(hyps: Sequence[Sequence[str]], refs: Sequence[Sequence[str]]) -> float:
    """Corpus BLEU-4 in [0, 100]: clipped n-gram precisions, brevity penalty, no smoothing.

    Tokens are compared as opaque strings.
    """
    return bleu_stats(hyps, refs).score


def commit_errors(pre_flush: Sequence[str], truth: Sequence[str]) -> int:
    return sum(1 for i, tok in enumerate(pre_flush) if i >= len(truth) or truth[i] != tok)


def commit_error_rate(pre_flush: Sequence[str], truth: Sequence[str]) -> float:
    if not pre_flush:
        return 0.0
    return commit_errors(pre_flush, truth) / len(pre_flush)

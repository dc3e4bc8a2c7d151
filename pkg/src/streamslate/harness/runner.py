"""Experiment runner: single runs, parameter sweeps and scoring of external logs."""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from ..core import CorpusMetrics, RunReport, Utterance, UtteranceRecord, texts
from ..decoders.base import Decoder
from ..engine import EngineConfig, Session
from ..errors import EmptyGrid, LengthMismatch, ParseError, StreamslateError, ConfigError
from ..metrics import (
    LatencyInput,
    average_lagging,
    average_proportion,
    bleu,
    commit_errors,
    dal,
)
from ..stability import Strategy
from .dataset import tokenize

log = logging.getLogger(__name__)

DEFAULT_ARRIVAL_MS = 100

SWEEP_HEADER = [
    "strategy",
    "n",
    "chunk_ms",
    "initial_wait_ms",
    "beam",
    "bleu",
    "al_ms",
    "al_corrected_ms",
    "ap",
    "dal_ms",
    "commit_error_rate",
]


@dataclass(frozen=True)
class LatencyScores:
    al_ms: float
    al_corrected_ms: float
    ap: float
    dal_ms: float


def latency_scores(delays_ms: Sequence[int], total_ms: int, ref_len: int) -> LatencyScores:
    if not delays_ms:
        # nothing was emitted: treat the output as produced after the whole source
        return LatencyScores(float(total_ms), float(total_ms), 1.0, float(total_ms))
    inp = LatencyInput(tuple(delays_ms), total_ms, ref_len)
    return LatencyScores(
        average_lagging(inp),
        average_lagging(inp, corrected=True),
        average_proportion(inp),
        dal(inp),
    )


@dataclass
class UtteranceRun:
    utterance: Utterance
    prediction: tuple[str, ...]
    delays_ms: list[int]
    pre_flush: tuple[str, ...]
    decode_calls: int


def drive(cfg: EngineConfig, u: Utterance, decoder: Decoder, arrival_ms: int = DEFAULT_ARRIVAL_MS) -> UtteranceRun:
    """Feed one utterance through a session in ``arrival_ms`` increments."""
    s = Session(cfg, u, decoder)
    try:
        while not s.source_finished:
            s.push_audio(min(arrival_ms, s.total_ms - s.arrived_ms))
            if s.source_finished:
                # the last chunk is decoded by the flush
                break
            s.step()
            while s.unread_ms >= s.threshold_ms:
                s.step()
        pre_flush = texts(s.committed)
        prediction, delays = s.finalize()
    except StreamslateError as exc:
        raise exc.with_utterance(u.id)
    return UtteranceRun(u, texts(prediction), delays, pre_flush, s.decode_calls)


def _record(r: UtteranceRun) -> tuple[UtteranceRecord, int]:
    u = r.utterance
    ref = texts(u.reference)
    lat = latency_scores(r.delays_ms, u.total_ms, len(ref))
    errors = commit_errors(r.pre_flush, ref)
    rate = errors / len(r.pre_flush) if r.pre_flush else 0.0
    rec = UtteranceRecord(
        id=u.id,
        prediction=r.prediction,
        delays_ms=tuple(r.delays_ms),
        pre_flush_commits=len(r.pre_flush),
        total_ms=u.total_ms,
        ref_len=len(ref),
        al_ms=lat.al_ms,
        al_corrected_ms=lat.al_corrected_ms,
        ap=lat.ap,
        dal_ms=lat.dal_ms,
        commit_error_rate=rate,
    )
    return rec, errors


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def run(
    cfg: EngineConfig,
    ds: Sequence[Utterance],
    decoder: Decoder,
    arrival_ms: int = DEFAULT_ARRIVAL_MS,
    workers: int = 1,
) -> RunReport:
    if not ds:
        raise ConfigError("cannot run on an empty dataset")
    if not 0 < arrival_ms <= cfg.chunk_ms:
        raise ConfigError(f"arrival_ms must be in (0, chunk_ms={cfg.chunk_ms}], got {arrival_ms}")
    utts = sorted(ds, key=lambda u: u.id)
    if workers > 1:
        if not getattr(decoder, "thread_safe", False):
            raise ConfigError("this decoder cannot be shared between workers; use workers=1")
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda u: drive(cfg, u, decoder, arrival_ms), utts))
    else:
        runs = [drive(cfg, u, decoder, arrival_ms) for u in utts]

    records, errors = zip(*(_record(r) for r in runs))
    n_pre = sum(rec.pre_flush_commits for rec in records)
    corpus = CorpusMetrics(
        bleu=bleu([rec.prediction for rec in records], [texts(u.reference) for u in utts]),
        al_ms=_mean([rec.al_ms for rec in records]),
        al_corrected_ms=_mean([rec.al_corrected_ms for rec in records]),
        ap=_mean([rec.ap for rec in records]),
        dal_ms=_mean([rec.dal_ms for rec in records]),
        commit_error_rate=sum(errors) / n_pre if n_pre else 0.0,
    )
    config = {
        "strategy": cfg.strategy.value,
        "n": cfg.n,
        "chunk_ms": cfg.chunk_ms,
        "initial_wait_ms": cfg.initial_wait_ms,
        "beam": cfg.beam_size,
        "seed": getattr(decoder, "seed", None),
        "arrival_ms": arrival_ms,
    }
    return RunReport(config, corpus, tuple(records))


@dataclass(frozen=True)
class SweepGrid:
    chunk_ms: Sequence[int]
    strategies: Sequence[Strategy | str]
    n: Sequence[int]
    initial_wait_ms: Sequence[int] = (0,)
    beam_size: Sequence[int] = (4,)

    def configs(self) -> list[EngineConfig]:
        axes = (self.strategies, self.n, self.chunk_ms, self.initial_wait_ms, self.beam_size)
        if any(len(a) == 0 for a in axes):
            raise EmptyGrid("every sweep axis needs at least one value")
        cfgs = {
            EngineConfig(chunk_ms=c, strategy=s, n=n, initial_wait_ms=w, beam_size=b)
            for s, n, c, w, b in itertools.product(*axes)
        }
        return sorted(
            cfgs,
            key=lambda k: (k.strategy.value, k.n, k.chunk_ms, k.initial_wait_ms, k.beam_size),
        )


def sweep_rows(grid: SweepGrid, ds: Sequence[Utterance], decoder: Decoder, arrival_ms: int = DEFAULT_ARRIVAL_MS, workers: int = 1) -> list[dict]:
    rows = []
    for cfg in grid.configs():
        rep = run(cfg, ds, decoder, min(arrival_ms, cfg.chunk_ms), workers)
        log.info("swept %s-%d chunk=%d wait=%d", cfg.strategy.value, cfg.n, cfg.chunk_ms, cfg.initial_wait_ms)
        m = rep.corpus
        rows.append(
            {
                "strategy": cfg.strategy.value,
                "n": cfg.n,
                "chunk_ms": cfg.chunk_ms,
                "initial_wait_ms": cfg.initial_wait_ms,
                "beam": cfg.beam_size,
                "bleu": m.bleu,
                "al_ms": m.al_ms,
                "al_corrected_ms": m.al_corrected_ms,
                "ap": m.ap,
                "dal_ms": m.dal_ms,
                "commit_error_rate": m.commit_error_rate,
            }
        )
    return rows


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_HEADER, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: f"{v:.4f}" if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def sweep(grid: SweepGrid, ds: Sequence[Utterance], decoder: Decoder, arrival_ms: int = DEFAULT_ARRIVAL_MS, workers: int = 1) -> str:
    """Run every grid point; returns the CSV table as text."""
    return rows_to_csv(sweep_rows(grid, ds, decoder, arrival_ms, workers))


def report_to_logs(report: RunReport, ds: Sequence[Utterance], joiner: str = " ") -> str:
    """Per-utterance log lines in the format :func:`score_logs` reads."""
    index = {u.id: u for u in ds}
    out = []
    for rec in report.utterances:
        u = index[rec.id]
        out.append(
            json.dumps(
                {
                    "id": rec.id,
                    "reference": joiner.join(texts(u.reference)),
                    "prediction": joiner.join(rec.prediction),
                    "delays_ms": list(rec.delays_ms),
                    "total_ms": rec.total_ms,
                },
                ensure_ascii=False,
            )
        )
    return "\n".join(out) + "\n"


def _num_list(v, what: str) -> list:
    if not isinstance(v, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        raise TypeError(f"{what} must be a list of numbers")
    return v


def score_logs(path: str | Path, tokenizer: str = "ws") -> dict:
    """Score externally produced streaming logs.

    Each line holds ``reference``, ``prediction``, ``delays_ms`` and either
    ``total_ms`` or ``segments_ms``. Lines whose classic average lagging is
    negative are flagged along with the hypothesis/reference length gap.
    """
    lines = []
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
                ref = tokenize(rec["reference"], tokenizer)
                hyp = tokenize(rec["prediction"], tokenizer)
                delays = _num_list(rec["delays_ms"], "delays_ms")
                if "total_ms" in rec:
                    total = rec["total_ms"]
                else:
                    total = sum(_num_list(rec["segments_ms"], "segments_ms"))
            except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
                if isinstance(exc, KeyError):
                    exc = f"missing field {exc}"
                raise ParseError(str(exc), lineno) from None
            if len(delays) != len(hyp):
                raise LengthMismatch(
                    f"line {lineno}: {len(delays)} delays for a {len(hyp)}-token prediction"
                )
            try:
                lat = latency_scores(delays, total, len(ref))
            except StreamslateError as exc:
                raise ParseError(str(exc), lineno) from None
            entry = {
                "line": lineno,
                "id": rec.get("id"),
                "hyp_len": len(hyp),
                "ref_len": len(ref),
                "al_ms": lat.al_ms,
                "al_corrected_ms": lat.al_corrected_ms,
                "ap": lat.ap,
                "dal_ms": lat.dal_ms,
                "negative_al": lat.al_ms < 0,
            }
            if lat.al_ms < 0:
                entry["length_excess"] = len(hyp) - len(ref)
            lines.append((entry, hyp, ref))
    if not lines:
        raise ParseError("log file holds no records")
    entries = [e for e, _, _ in lines]
    corpus = {
        "bleu": bleu([h for _, h, _ in lines], [r for _, _, r in lines]),
        "al_ms": _mean([e["al_ms"] for e in entries]),
        "al_corrected_ms": _mean([e["al_corrected_ms"] for e in entries]),
        "ap": _mean([e["ap"] for e in entries]),
        "dal_ms": _mean([e["dal_ms"] for e in entries]),
        "negative_al_lines": [e["line"] for e in entries if e["negative_al"]],
    }
    return {"corpus": corpus, "lines": entries}


def _round_floats(obj):
    if isinstance(obj, float):
        return round(obj, 4)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_floats(v) for v in obj]
    return obj


def scores_to_json(scores: dict) -> str:
    return json.dumps(_round_floats(scores), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

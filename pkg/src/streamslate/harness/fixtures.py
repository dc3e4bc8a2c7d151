"""Synthetic datasets and recorded scripts bundled with the package."""

from __future__ import annotations

import random
from importlib import resources
from pathlib import Path

from ..core import Token, Utterance, tokens
from ..decoders.scripted import RecordingDecoder
from ..decoders.sim import SimDecoder, SimDecoderConfig
from ..engine import EngineConfig
from .dataset import Dataset
from .runner import run

VOCAB = (
    "wir haben heute ein neues modell für die übersetzung von gesprochener sprache "
    "trainiert und es funktioniert schon recht gut aber manchmal macht das system "
    "noch fehler bei langen sätzen mit vielen nebensätzen deshalb warten wir auf "
    "mehr kontext bevor wir etwas ausgeben"
).split()

MIN_MS = 2000
MAX_MS = 8000


def gen_dataset(seed: int = 7, count: int = 20, ms_per_token: int = 400) -> Dataset:
    """Utterances of 2-8 s with evenly spread, jittered token reveal times."""
    rng = random.Random(seed)
    utts = []
    for k in range(count):
        total = rng.randint(MIN_MS, MAX_MS)
        segments = []
        left = total
        while left > 0:
            seg = min(left, rng.randint(200, 1200))
            segments.append(seg)
            left -= seg
        n_tok = max(2, total // ms_per_token)
        words = [rng.choice(VOCAB) for _ in range(n_tok)]
        step = total / (n_tok + 1)
        reveals = []
        prev = 0
        for i in range(n_tok):
            t = int(step * (i + 1) + rng.uniform(-0.4, 0.4) * step)
            t = min(max(t, prev, 1), total)
            reveals.append(t)
            prev = t
        utts.append(
            Utterance(
                id=f"sim{k:03d}",
                segments_ms=tuple(segments),
                reference=tokens(words),
                timeline=tuple((t, Token(w)) for t, w in zip(reveals, words)),
            )
        )
    return Dataset(utts)


def record_script(ds: Dataset, cfg: EngineConfig, sim_cfg: SimDecoderConfig, arrival_ms: int = 100):
    """Run the simulator once and capture every beam it produced, keyed for replay."""
    rec = RecordingDecoder(SimDecoder(ds, sim_cfg))
    run(cfg, ds, rec, arrival_ms)
    return rec.script


def fixture_path(*parts: str) -> Path:
    return Path(str(resources.files("streamslate").joinpath("fixtures", *parts)))

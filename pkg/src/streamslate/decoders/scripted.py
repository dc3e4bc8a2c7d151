"""Replay of recorded beams, keyed by (utterance id, audio prefix).

Script files are JSON Lines, one decode record per line::

    {"id": "utt1", "prefix_ms": 500, "beams": [{"tokens": ["wir"], "score": 0.0, "eos": false}]}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping

from ..core import Beam
from ..errors import MissingScriptEntry, ParseError, ValidationError
from .base import DecodeRequest, beam_from_wire, beam_to_wire

ScriptKey = tuple[str, int]


def load_script(path: str | Path) -> dict[ScriptKey, Beam]:
    script: dict[ScriptKey, Beam] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                key = (str(rec["id"]), int(rec["prefix_ms"]))
                beam = beam_from_wire(rec["beams"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, ValidationError) as exc:
                raise ParseError(f"bad script record: {exc}", lineno) from None
            if key in script:
                raise ParseError(f"duplicate script key {key}", lineno)
            script[key] = beam
    return script


def dump_script(script: Mapping[ScriptKey, Beam], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for (uid, prefix), beam in sorted(script.items()):
            rec = {"id": uid, "prefix_ms": prefix, "beams": beam_to_wire(beam)}
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


def scripted_decode(script: Mapping[ScriptKey, Beam], req: DecodeRequest) -> Beam:
    # verbatim replay; the engine enforces the forced-prefix contract
    try:
        return script[(req.utterance_id, req.audio_prefix_ms)]
    except KeyError:
        raise MissingScriptEntry(
            f"no scripted beam for utterance {req.utterance_id!r} at {req.audio_prefix_ms} ms"
        ) from None


class ScriptedDecoder:
    thread_safe = True
    name = "script"
    seed = None

    def __init__(self, script: Mapping[ScriptKey, Beam] | Iterable[tuple[ScriptKey, Beam]]):
        self.script = dict(script)

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedDecoder":
        return cls(load_script(path))

    def decode(self, req: DecodeRequest) -> Beam:
        return scripted_decode(self.script, req)


class RecordingDecoder:
    """Wraps a decoder and records every beam it returns, for building scripts."""

    def __init__(self, inner):
        self.inner = inner
        self.thread_safe = getattr(inner, "thread_safe", False)
        self.name = getattr(inner, "name", "recorded")
        self.seed = getattr(inner, "seed", None)
        self.script: dict[ScriptKey, Beam] = {}

    def decode(self, req: DecodeRequest) -> Beam:
        beam = self.inner.decode(req)
        self.script[(req.utterance_id, req.audio_prefix_ms)] = beam
        return beam

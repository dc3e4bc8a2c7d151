"""Manifest loading and tokenization.

A manifest is JSON Lines with one utterance per line::

    {"id": "u1", "segments_ms": [1200, 900], "reference": "wir haben", "timeline": [[800, "wir"], [1500, "haben"]]}

``timeline`` is optional and only used by the simulated decoder.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Callable, Iterator, Sequence

from ..core import Token, Utterance, tokens, validate_utterance
from ..errors import DuplicateId, ParseError, StreamslateError

TOKENIZERS: dict[str, Callable[[str], list[str]]] = {
    "ws": str.split,
    "char": lambda s: [ch for ch in s if not ch.isspace()],
}


def tokenize(text: str, tokenizer: str = "ws") -> list[str]:
    try:
        return TOKENIZERS[tokenizer](text)
    except KeyError:
        raise ValueError(f"unknown tokenizer {tokenizer!r}; expected one of {sorted(TOKENIZERS)}") from None


class Dataset(Sequence[Utterance]):
    def __init__(self, utterances: Sequence[Utterance]):
        seen = set()
        for u in utterances:
            if u.id in seen:
                raise DuplicateId(f"duplicate utterance id {u.id!r}")
            seen.add(u.id)
            validate_utterance(u)
        self._utts = tuple(utterances)

    def __getitem__(self, i):
        return self._utts[i]

    def __len__(self) -> int:
        return len(self._utts)

    def __iter__(self) -> Iterator[Utterance]:
        return iter(self._utts)

    def by_id(self) -> dict[str, Utterance]:
        return {u.id: u for u in self._utts}

    def subset(self, ids: Sequence[str]) -> "Dataset":
        index = self.by_id()
        return Dataset([index[i] for i in ids])


def utterance_from_record(rec: dict, tokenizer: str = "ws") -> Utterance:
    uid = rec["id"]
    if not isinstance(uid, (str, int)) or isinstance(uid, bool):
        raise TypeError("id must be a string")
    segs = rec["segments_ms"]
    if not isinstance(segs, list):
        raise TypeError("segments_ms must be a list")
    ref = rec["reference"]
    if not isinstance(ref, str):
        raise TypeError("reference must be a string")
    timeline = rec.get("timeline")
    if timeline is not None:
        timeline = tuple((int(ms), Token(str(tok))) for ms, tok in timeline)
    return Utterance(str(uid), tuple(segs), tokens(tokenize(ref, tokenizer)), timeline)


def utterance_to_record(u: Utterance, joiner: str = " ") -> dict:
    rec = {"id": u.id, "segments_ms": list(u.segments_ms), "reference": joiner.join(t.text for t in u.reference)}
    if u.timeline is not None:
        rec["timeline"] = [[ms, tok.text] for ms, tok in u.timeline]
    return rec


def load_dataset(path: str | Path, tokenizer: str = "ws") -> Dataset:
    utts = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                u = validate_utterance(utterance_from_record(json.loads(line), tokenizer))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, StreamslateError) as exc:
                if isinstance(exc, KeyError):
                    exc = f"missing field {exc}"
                raise ParseError(str(exc), lineno) from None
            if u.id in seen:
                raise DuplicateId(f"line {lineno}: duplicate utterance id {u.id!r}")
            seen.add(u.id)
            utts.append(u)
    return Dataset(utts)


def dataset_to_jsonl(ds: Sequence[Utterance]) -> str:
    return "".join(json.dumps(utterance_to_record(u), ensure_ascii=False) + "\n" for u in ds)


def dump_dataset(ds: Sequence[Utterance], path: str | Path) -> None:
    Path(path).write_text(dataset_to_jsonl(ds), encoding="utf-8")

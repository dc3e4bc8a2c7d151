"""Bridge peer that serves beams from a script file.

    python -m streamslate.decoders.mock_peer --script beams.jsonl [--die-after N]

Used to exercise the bridge protocol without a real model.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bridge import PROTOCOL_VERSION


def _load(path: str) -> dict[tuple[str, int], list]:
    table = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                rec = json.loads(line)
                table[(str(rec["id"]), int(rec["prefix_ms"]))] = rec["beams"]
    return table


def serve(table, stdin, stdout, die_after: int | None = None, omit_beams: bool = False) -> int:
    answered = 0
    for line in stdin:
        msg = json.loads(line)
        kind = msg.get("type")
        if kind == "hello":
            reply = {"type": "hello", "version": PROTOCOL_VERSION}
        elif kind == "decode":
            if die_after is not None and answered >= die_after:
                return 3
            beams = table.get((str(msg["id"]), int(msg["prefix_ms"])))
            if beams is None:
                reply = {"type": "error", "message": f"no beam for {msg['id']}@{msg['prefix_ms']}"}
            elif omit_beams:
                reply = {"hypotheses": beams}
            else:
                reply = {"beams": beams}
            answered += 1
        else:
            reply = {"type": "error", "message": f"unknown request type {kind!r}"}
        stdout.write(json.dumps(reply, ensure_ascii=False) + "\n")
        stdout.flush()
    return 0


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--script", required=True)
    p.add_argument("--die-after", type=int, default=None, help="exit after answering N decode requests")
    p.add_argument("--omit-beams", action="store_true", help="answer without the beams field")
    args = p.parse_args(argv)
    sys.stdin.reconfigure(encoding="utf-8")
    sys.stdout.reconfigure(encoding="utf-8")
    return serve(_load(args.script), sys.stdin, sys.stdout, args.die_after, args.omit_beams)


if __name__ == "__main__":
    sys.exit(main())

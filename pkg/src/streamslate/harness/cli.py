"""Command line entry point: ``streamslate run|sweep|score-logs|gen-fixture``."""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from pathlib import Path

from ..decoders.bridge import DEFAULT_TIMEOUT_S, BridgeDecoder
from ..decoders.scripted import ScriptedDecoder
from ..decoders.sim import SimDecoder, SimDecoderConfig
from ..engine import EngineConfig
from ..errors import StreamslateError
from .dataset import dataset_to_jsonl, load_dataset
from .fixtures import fixture_path, gen_dataset
from .runner import DEFAULT_ARRIVAL_MS, SweepGrid, report_to_logs, run, score_logs, scores_to_json, sweep

log = logging.getLogger("streamslate")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="utterance manifest (JSON Lines); defaults to the bundled sim fixture")
    p.add_argument("--decoder", choices=["sim", "script", "bridge"], default="sim")
    p.add_argument("--script", help="beam script for --decoder script")
    p.add_argument("--seed", type=int, default=7, help="sim decoder seed")
    p.add_argument("--tail-len", type=int, default=2, help="unstable guess tokens per sim hypothesis")
    p.add_argument("--beam-jitter", type=int, default=3, help="alternate hypotheses per sim beam")
    p.add_argument("--bridge-timeout", type=float, default=DEFAULT_TIMEOUT_S)
    p.add_argument("--arrival-ms", type=int, default=DEFAULT_ARRIVAL_MS)
    p.add_argument("--tokenizer", choices=["ws", "char"], default="ws")
    p.add_argument("--workers", type=int, default=1)


@contextlib.contextmanager
def _decoder(args, ds):
    if args.decoder == "sim":
        yield SimDecoder(ds, SimDecoderConfig(args.tail_len, args.seed, args.beam_jitter))
    elif args.decoder == "script":
        if not args.script:
            raise SystemExit("--decoder script needs --script PATH")
        yield ScriptedDecoder.from_file(args.script)
    else:
        with BridgeDecoder(timeout=args.bridge_timeout) as peer:
            yield peer


def _dataset(args):
    path = args.dataset or fixture_path("sim_manifest.jsonl")
    return load_dataset(path, args.tokenizer)


def cmd_run(args) -> int:
    cfg = EngineConfig(
        chunk_ms=args.chunk_ms,
        strategy=args.strategy,
        n=args.n,
        initial_wait_ms=args.initial_wait_ms,
        beam_size=args.beam,
    )
    ds = _dataset(args)
    with _decoder(args, ds) as dec:
        report = run(cfg, ds, dec, args.arrival_ms, args.workers)
    _emit(report.to_json(), args.report)
    if args.logs:
        joiner = "" if args.tokenizer == "char" else " "
        Path(args.logs).write_text(report_to_logs(report, ds, joiner), encoding="utf-8")
    return 0


def cmd_sweep(args) -> int:
    grid = SweepGrid(
        chunk_ms=args.chunk_ms,
        strategies=args.strategy,
        n=args.n,
        initial_wait_ms=args.initial_wait_ms,
        beam_size=args.beam,
    )
    ds = _dataset(args)
    with _decoder(args, ds) as dec:
        table = sweep(grid, ds, dec, args.arrival_ms, args.workers)
    _emit(table, args.csv)
    return 0


def cmd_score_logs(args) -> int:
    _emit(scores_to_json(score_logs(args.logs, args.tokenizer)), args.report)
    return 0


def cmd_gen_fixture(args) -> int:
    _emit(dataset_to_jsonl(gen_dataset(args.seed, args.count)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="streamslate", description="Streaming translation from offline decoders.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate one configuration")
    _add_common(p)
    p.add_argument("--strategy", choices=["hold", "la", "sp"], default="la")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--chunk-ms", type=int, default=500)
    p.add_argument("--initial-wait-ms", type=int, default=0)
    p.add_argument("--beam", type=int, default=4)
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--logs", help="also write per-utterance logs readable by score-logs")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="evaluate a grid of configurations (comma-separated lists)")
    _add_common(p)
    p.add_argument("--strategy", type=_str_list, default=["la"])
    p.add_argument("--n", type=_int_list, default=[2])
    p.add_argument("--chunk-ms", type=_int_list, default=[250, 500, 1000, 2000])
    p.add_argument("--initial-wait-ms", type=_int_list, default=[0])
    p.add_argument("--beam", type=_int_list, default=[4])
    p.add_argument("--csv", help="write the CSV table here instead of stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("score-logs", help="score externally produced streaming logs")
    p.add_argument("logs", help="JSON Lines log file")
    p.add_argument("--tokenizer", choices=["ws", "char"], default="ws")
    p.add_argument("--report")
    p.set_defaults(func=cmd_score_logs)

    p = sub.add_parser("gen-fixture", help="emit the bundled synthetic dataset")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--count", type=int, default=20)
    p.set_defaults(func=cmd_gen_fixture)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except StreamslateError as exc:
        print(f"streamslate: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

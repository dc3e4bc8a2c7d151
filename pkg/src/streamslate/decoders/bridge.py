"""Decoder that forwards requests to an external process over line-delimited JSON.

Protocol (one JSON object per line, UTF-8, on the peer's stdin/stdout):

    -> {"type": "hello", "version": 1}
    <- {"type": "hello", "version": 1}
    -> {"type": "decode", "id": "utt1", "prefix_ms": 500, "forced": ["wir"], "beam": 4}
    <- {"beams": [{"tokens": ["wir", "haben"], "score": 0.0, "eos": false}, ...]}

Only one request is in flight at a time. Anything the peer writes to stderr
is passed through untouched.
"""

from __future__ import annotations

import json
import logging
import os
import queue
import shlex
import subprocess
import threading
from typing import Sequence

from ..core import Beam, texts
from ..errors import BridgeTimeout, PeerExited, ProtocolError, ValidationError
from .base import DecodeRequest, beam_from_wire

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
BRIDGE_CMD_ENV = "STREAMSLATE_BRIDGE_CMD"
DEFAULT_TIMEOUT_S = 60.0

_EOF = object()


def bridge_command_from_env(env: dict | None = None) -> list[str]:
    env = os.environ if env is None else env
    cmd = env.get(BRIDGE_CMD_ENV, "").strip()
    if not cmd:
        raise PeerExited(f"{BRIDGE_CMD_ENV} is not set; no bridge peer to start")
    return shlex.split(cmd)


def encode_request(req: DecodeRequest) -> str:
    return json.dumps(
        {
            "type": "decode",
            "id": req.utterance_id,
            "prefix_ms": req.audio_prefix_ms,
            "forced": list(texts(req.forced)),
            "beam": req.beam_size,
        },
        ensure_ascii=False,
    )


def parse_response(line: str, beam_size: int) -> Beam:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed response line: {exc}") from None
    if not isinstance(obj, dict):
        raise ProtocolError("response must be a JSON object")
    if obj.get("type") == "error":
        raise ProtocolError(f"peer reported an error: {obj.get('message', '')}")
    if "beams" not in obj:
        raise ProtocolError("response is missing the 'beams' field")
    try:
        return beam_from_wire(obj["beams"], beam_size)
    except ValidationError as exc:
        raise ProtocolError(f"invalid beams: {exc}") from None


class BridgeDecoder:
    """Owns one peer process. Not safe for concurrent use; start one per worker."""

    thread_safe = False
    name = "bridge"
    seed = None

    def __init__(self, command: Sequence[str] | None = None, timeout: float = DEFAULT_TIMEOUT_S, env: dict | None = None):
        self.command = list(command) if command is not None else bridge_command_from_env()
        self.timeout = timeout
        self._env = env
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()
        self._lock = threading.Lock()

    def __enter__(self) -> "BridgeDecoder":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    @property
    def pid(self) -> int | None:
        return self._proc.pid if self._proc else None

    def start(self) -> None:
        if self._proc is not None:
            return
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
                env=self._env,
            )
        except OSError as exc:
            raise PeerExited(f"could not start bridge peer {self.command!r}: {exc}") from None
        threading.Thread(target=self._pump, args=(self._proc.stdout,), daemon=True).start()
        self._send({"type": "hello", "version": PROTOCOL_VERSION})
        reply = self._recv()
        try:
            obj = json.loads(reply)
        except json.JSONDecodeError:
            raise ProtocolError(f"bad handshake line {reply!r}") from None
        if not isinstance(obj, dict) or obj.get("type") != "hello" or obj.get("version") != PROTOCOL_VERSION:
            raise ProtocolError(f"unexpected handshake reply {obj!r}")
        log.debug("bridge peer %s ready", self._proc.pid)

    def _pump(self, stream) -> None:
        for line in stream:
            self._lines.put(line)
        self._lines.put(_EOF)

    def _send(self, obj: dict | str) -> None:
        line = obj if isinstance(obj, str) else json.dumps(obj)
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError, ValueError):
            raise PeerExited(f"bridge peer exited (code {self._proc.poll()})") from None

    def _recv(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            # a late answer would desynchronise the stream, so the peer is not reused
            self._proc.kill()
            raise BridgeTimeout(f"bridge peer did not answer within {self.timeout} s") from None
        if line is _EOF:
            # keep the sentinel around so later calls fail the same way
            self._lines.put(_EOF)
            try:
                code = self._proc.wait(timeout=1)
            except subprocess.TimeoutExpired:
                code = None
            raise PeerExited(f"bridge peer closed its output (exit code {code})")
        return line

    def decode(self, req: DecodeRequest) -> Beam:
        with self._lock:
            if self._proc is None:
                self.start()
            self._send(encode_request(req))
            return parse_response(self._recv(), req.beam_size)

    def close(self) -> None:
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            proc.stdin.close()
        except OSError:
            pass
        try:
            proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait()
        self._lines = queue.Queue()


def bridge_decode(peer: BridgeDecoder, req: DecodeRequest) -> Beam:
    return peer.decode(req)

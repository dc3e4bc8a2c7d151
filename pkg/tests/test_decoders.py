import itertools
import json

import pytest
from hypothesis import given, strategies as st

from streamslate.core import Token, Utterance, texts, tokens
from streamslate.decoders.base import DecodeRequest, beam_from_wire, beam_to_wire
from streamslate.decoders.scripted import ScriptedDecoder, dump_script, load_script, scripted_decode
from streamslate.decoders.sim import SimDecoder, SimDecoderConfig, guess_tails, is_guess, sim_decode
from streamslate.engine import EngineConfig, Session
from streamslate.errors import DecoderViolation, MissingScriptEntry, MissingTimeline, ParseError
from streamslate.harness.fixtures import fixture_path

from conftest import beam

U = Utterance(
    "u1",
    (1000, 1000),
    tokens(["wir", "haben"]),
    ((800, Token("wir")), (1500, Token("haben"))),
)


def req(prefix, forced=(), B=4, uid="u1"):
    return DecodeRequest(uid, prefix, tokens(forced), B)


class TestSim:
    def test_reveal_threshold(self):
        b = sim_decode(SimDecoderConfig(tail_len=0), U, req(1000))
        assert texts(b.best.tokens) == ("wir",)
        assert len(b.items) == 1

    def test_tails_keyed_by_prefix(self):
        cfg = SimDecoderConfig(tail_len=2, seed=7)
        at_1000 = guess_tails(cfg, "u1", 1000, 1)[0]
        at_1500 = guess_tails(cfg, "u1", 1500, 1)[0]
        assert at_1000 != at_1500
        assert texts(sim_decode(cfg, U, req(1000)).best.tokens) == ("wir",) + texts(at_1000)
        assert texts(sim_decode(cfg, U, req(1500)).best.tokens) == ("wir", "haben") + texts(at_1500)

    def test_la2_commits_only_truth(self):
        ds = {"u1": U}
        cfg = EngineConfig(chunk_ms=500, initial_wait_ms=1000, strategy="la", n=2)
        s = Session(cfg, U, SimDecoder(ds, SimDecoderConfig(tail_len=2)))
        s.push_audio(1000)
        s.step()
        s.push_audio(500)
        s.step()
        assert (s.c, s.read_ms) == (2, 1500)
        assert set(texts(s.committed)) <= {"wir", "haben"}
        assert texts(s.committed) == ("wir",)

    def test_scores_and_tail_only_perturbation(self):
        b = sim_decode(SimDecoderConfig(tail_len=2, beam_jitter=3), U, req(1600, B=4))
        assert [h.score for h in b.items] == [0.0, -1.0, -2.0, -3.0]
        for h in b.items:
            assert texts(h.tokens[:2]) == ("wir", "haben")
            assert all(is_guess(t) for t in h.tokens[2:])
        assert len({texts(h.tokens) for h in b.items}) == 4

    def test_beam_size_caps_items(self):
        assert len(sim_decode(SimDecoderConfig(beam_jitter=5), U, req(1000, B=2)).items) == 2

    def test_eos_only_when_complete(self):
        cfg = SimDecoderConfig(tail_len=0)
        assert not sim_decode(cfg, U, req(1000)).best.has_eos
        assert sim_decode(cfg, U, req(1500)).best.has_eos
        assert not sim_decode(SimDecoderConfig(tail_len=2), U, req(1500)).best.has_eos

    def test_full_view_has_no_guesses(self):
        b = sim_decode(SimDecoderConfig(tail_len=3, beam_jitter=3), U, req(2000))
        assert texts(b.best.tokens) == ("wir", "haben", "</s>")

    def test_forced_prefix_overrides(self):
        b = sim_decode(SimDecoderConfig(tail_len=1), U, req(1600, forced=["ihr"]))
        for h in b.items:
            assert texts(h.tokens[:2]) == ("ihr", "haben")

    def test_missing_timeline(self):
        bare = Utterance("u2", (1000,), tokens(["x"]))
        with pytest.raises(MissingTimeline):
            sim_decode(SimDecoderConfig(), bare, req(500, uid="u2"))

    def test_deterministic(self):
        cfg = SimDecoderConfig(tail_len=3, seed=11)
        assert sim_decode(cfg, U, req(900)) == sim_decode(cfg, U, req(900))
        assert sim_decode(cfg, U, req(900)) != sim_decode(SimDecoderConfig(tail_len=3, seed=12), U, req(900))

    @given(st.integers(1, 2000), st.integers(0, 3), st.integers(0, 2))
    def test_truth_prefix_exact(self, prefix, tail, n_forced):
        truth = [t for r, t in U.timeline if r <= prefix]
        forced = texts(truth[:n_forced])
        b = sim_decode(SimDecoderConfig(tail_len=tail), U, req(prefix, forced=forced))
        for h in b.items:
            assert h.tokens[: len(truth)] == tuple(truth)

    def test_bundled_fixture_tails_always_differ(self, sim_ds):
        cfg = SimDecoderConfig()
        for u in sim_ds:
            firsts = {}
            for prefix in range(50, u.total_ms, 50):
                tails = guess_tails(cfg, u.id, prefix, 1 + cfg.beam_jitter)
                for tail in tails:
                    assert tail[0].text not in firsts, (u.id, prefix, firsts.get(tail[0].text))
                    firsts[tail[0].text] = prefix


class TestScripted:
    def test_lookup(self):
        script = load_script(fixture_path("la2_500ms", "script.jsonl"))
        b = scripted_decode(script, req(500, uid="utt1"))
        assert texts(b.best.tokens) == ("wir", "haben")

    def test_missing_entry(self):
        with pytest.raises(MissingScriptEntry):
            ScriptedDecoder({}).decode(req(500))

    def test_violation_surfaces_in_engine(self):
        dec = ScriptedDecoder({("u1", 500): beam("wir haben"), ("u1", 1000): beam("ihr habt"), ("u1", 2000): beam("x")})
        s = Session(EngineConfig(chunk_ms=500, strategy="hold", n=0), U, dec)
        s.push_audio(500)
        s.step()
        s.push_audio(500)
        with pytest.raises(DecoderViolation):
            s.step()

    def test_roundtrip(self, tmp_path):
        script = {("u1", 500): beam("a b", "a c"), ("u2", 700): beam("x", eos={0})}
        dump_script(script, tmp_path / "s.jsonl")
        assert load_script(tmp_path / "s.jsonl") == script

    def test_parse_error_line(self, tmp_path):
        p = tmp_path / "s.jsonl"
        p.write_text('{"id": "a", "prefix_ms": 1, "beams": [{"tokens": ["x"]}]}\n{"id": "b"}\n')
        with pytest.raises(ParseError) as e:
            load_script(p)
        assert e.value.line == 2


def test_wire_roundtrip():
    b = beam("a b", "a", eos={1})
    assert beam_from_wire(json.loads(json.dumps(beam_to_wire(b)))) == b

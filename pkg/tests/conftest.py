from __future__ import annotations

from pathlib import Path

import pytest

from streamslate.core import Beam, Hypothesis, EOS, tokens
from streamslate.harness.dataset import load_dataset
from streamslate.harness.fixtures import fixture_path

HERE = Path(__file__).parent


def beam(*seqs, size=None, eos=()):
    """Beam from whitespace strings, ranked in the order given."""
    hyps = []
    for rank, s in enumerate(seqs):
        toks = tokens(s.split())
        if rank in eos:
            toks += (EOS,)
        hyps.append(Hypothesis(toks, -float(rank)))
    return Beam(tuple(hyps), size or len(hyps))


@pytest.fixture(scope="session")
def sim_ds():
    return load_dataset(fixture_path("sim_manifest.jsonl"))


@pytest.fixture
def test_fixture():
    return lambda name: HERE / "fixtures" / name


ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        ACCEPTANCE[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict in sorted(ACCEPTANCE.items()):
        terminalreporter.write_line(f"{verdict}  {name}")

import pytest
from hypothesis import given, strategies as st

from streamslate.core import (
    EOS,
    READ,
    ActionKind,
    AgentAction,
    Beam,
    CommitLog,
    Hypothesis,
    Token,
    Utterance,
    strip_eos,
    texts,
    tokens,
    validate_utterance,
)
from streamslate.errors import (
    EmptySegments,
    InvalidBeam,
    InvalidToken,
    NonPositiveDuration,
    TimelineOutOfRange,
    ValidationError,
)


def utt(segments, ref="a", timeline=None):
    return Utterance("u", tuple(segments), tokens(ref.split()), timeline)


def test_validate_ok_and_total():
    u = validate_utterance(utt([1000, 1000]))
    assert u.total_ms == 2000


def test_validate_empty_segments():
    with pytest.raises(EmptySegments):
        validate_utterance(utt([]))


@pytest.mark.parametrize("seg", [0, -5, 1.5])
def test_validate_non_positive(seg):
    with pytest.raises(NonPositiveDuration):
        validate_utterance(utt([1000, seg]))


def test_validate_timeline_out_of_range():
    with pytest.raises(TimelineOutOfRange):
        validate_utterance(utt([1000, 1000], timeline=((5000, Token("a")),)))


def test_validate_timeline_must_be_sorted():
    with pytest.raises(TimelineOutOfRange):
        validate_utterance(utt([2000], timeline=((900, Token("a")), (800, Token("b")))))


def test_token_text_non_empty():
    with pytest.raises(InvalidToken):
        Token("")


def test_eos_only_last():
    Hypothesis(tokens(["a", "b"]) + (EOS,))
    with pytest.raises(InvalidToken):
        Hypothesis((Token("a"), EOS, Token("b")))


@pytest.mark.parametrize(
    "seq, expected",
    [(("a", "b", EOS), ("a", "b")), (("a", "b"), ("a", "b")), ((EOS,), ())],
)
def test_strip_eos(seq, expected):
    h = Hypothesis(tuple(t if isinstance(t, Token) else Token(t) for t in seq))
    assert texts(strip_eos(h).tokens) == expected


def test_beam_sorted_with_lexicographic_tiebreak():
    b = Beam(
        (
            Hypothesis(tokens(["b"]), 0.0),
            Hypothesis(tokens(["z"]), 1.0),
            Hypothesis(tokens(["a", "c"]), 0.0),
        ),
        4,
    )
    assert [texts(h.tokens) for h in b.items] == [("z",), ("a", "c"), ("b",)]


def test_beam_size_bounds():
    with pytest.raises(InvalidBeam):
        Beam((), 4)
    with pytest.raises(InvalidBeam):
        Beam((Hypothesis(tokens(["a"])), Hypothesis(tokens(["b"]))), 1)


def test_commit_log_append_only_checks():
    log = CommitLog()
    log.append(Token("a"), 500, 1)
    with pytest.raises(ValidationError):
        log.append(Token("b"), 400, 2)
    with pytest.raises(ValidationError):
        log.append(EOS, 600, 2)
    assert texts(log.tokens) == ("a",)


@given(
    st.lists(
        st.tuples(
            st.text(min_size=1, max_size=4),
            st.integers(0, 500),
            st.integers(0, 3),
        ),
        max_size=20,
    )
)
def test_commit_log_roundtrip(steps):
    log = CommitLog()
    delay = chunk = 0
    for text, dd, dc in steps:
        delay += dd
        chunk += dc
        log.append(Token(text), delay, chunk)
    again = CommitLog.from_json(log.to_json())
    assert again.entries == log.entries


def test_agent_action_payload_rules():
    assert READ.kind is ActionKind.READ
    with pytest.raises(ValidationError):
        AgentAction(ActionKind.WRITE, ())
    assert AgentAction(ActionKind.WRITE, tokens(["a"])).payload == tokens(["a"])

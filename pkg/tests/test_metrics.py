import pytest
from hypothesis import assume, given, settings, strategies as st

from streamslate.errors import EmptyHypothesis, ValidationError, ZeroLength
from streamslate.metrics import (
    LatencyInput,
    average_lagging,
    average_proportion,
    commit_error_rate,
    dal,
    ideal_delays,
)

from oracles import al_reference, ap_reference, dal_reference

TOL = 1e-6


def L(delays, total, ref_len):
    return LatencyInput(tuple(delays), total, ref_len)


class TestIdealDelays:
    def test_reference_length(self):
        assert ideal_delays(3000, 3) == [0, 1000, 2000]

    def test_extends_past_reference(self):
        assert ideal_delays(2000, 2, 5) == [0, 1000, 2000, 3000, 4000]

    def test_corrected_length(self):
        assert ideal_delays(2000, max(5, 2), 5) == [0, 400, 800, 1200, 1600]

    def test_zero_length(self):
        with pytest.raises(ZeroLength):
            ideal_delays(2000, 0)


class TestAverageLagging:
    def test_even_policy(self):
        assert average_lagging(L([1000, 2000, 3000], 3000, 3)) == pytest.approx(1000.0, abs=TOL)

    def test_offline(self):
        assert average_lagging(L([3000, 3000, 3000], 3000, 3)) == pytest.approx(3000.0, abs=TOL)

    def test_overlong_hypothesis(self):
        inp = L([1000, 1000, 1000, 1000, 2000], 2000, 2)
        assert average_lagging(inp) == pytest.approx(-800.0, abs=TOL)
        assert average_lagging(inp, corrected=True) == pytest.approx(400.0, abs=TOL)

    def test_tau_falls_back_to_all_tokens(self):
        # no token at full read: every token counts
        assert average_lagging(L([500, 1000], 2000, 2)) == pytest.approx(250.0, abs=TOL)

    def test_tau_first_full_read(self):
        assert average_lagging(L([1000, 2000, 2000], 2000, 3)) == pytest.approx(
            (1000 + 2000 - 2000 / 3) / 2, abs=TOL
        )

    def test_negative_without_overgeneration(self):
        # classic AL can dip below zero even when |Y| == |Y*|
        assert average_lagging(L([1, 1, 1, 1, 5], 5, 5)) == pytest.approx(-0.2, abs=TOL)

    def test_empty(self):
        with pytest.raises(EmptyHypothesis):
            L([], 1000, 2)

    @pytest.mark.parametrize("delays", [[0, 100], [100, 2500], [200, 100]])
    def test_invalid_delays(self, delays):
        with pytest.raises(ValidationError):
            L(delays, 2000, 2)


class TestAverageProportion:
    def test_even(self):
        assert average_proportion(L([1000, 2000, 3000], 3000, 3)) == pytest.approx(2 / 3, abs=TOL)

    def test_offline(self):
        assert average_proportion(L([3000] * 3, 3000, 3)) == 1.0

    def test_single_token(self):
        assert average_proportion(L([700], 700, 4)) == 1.0


class TestDal:
    @pytest.mark.parametrize(
        "delays, expected",
        [([1000, 2000, 3000], 1000.0), ([3000, 3000, 3000], 3000.0), ([100, 100, 100], 100.0)],
    )
    def test_examples(self, delays, expected):
        assert dal(L(delays, 3000, 3)) == pytest.approx(expected, abs=TOL)


class TestCommitErrorRate:
    def test_examples(self):
        assert commit_error_rate(["a", "b"], ["a", "b", "c"]) == 0.0
        assert commit_error_rate(["a", "x"], ["a", "b", "c"]) == 0.5
        assert commit_error_rate([], ["a"]) == 0.0

    def test_overhang_counts_as_error(self):
        assert commit_error_rate(["a", "b"], ["a"]) == 0.5


@st.composite
def latency_inputs(draw):
    total = draw(st.integers(1, 20000))
    k = draw(st.integers(1, 30))
    delays = sorted(draw(st.lists(st.integers(1, total), min_size=k, max_size=k)))
    if draw(st.booleans()):
        # engine-style logs end with a full-read token
        delays[-1] = total
    ref_len = draw(st.integers(1, 40))
    return L(delays, total, ref_len)


@given(latency_inputs())
def test_matches_exact_oracle(inp):
    d, T, r = list(inp.delays_ms), inp.total_ms, inp.ref_len
    for corrected in (False, True):
        want = float(al_reference(d, T, r, corrected=corrected))
        assert average_lagging(inp, corrected) == pytest.approx(want, rel=TOL, abs=TOL)
    assert average_proportion(inp) == pytest.approx(float(ap_reference(d, T)), rel=TOL)
    assert dal(inp) == pytest.approx(float(dal_reference(d, T, r)), rel=TOL, abs=TOL)


@given(latency_inputs())
def test_corrected_never_below_classic(inp):
    classic = average_lagging(inp)
    corrected = average_lagging(inp, corrected=True)
    assert corrected >= classic - TOL * max(1.0, abs(classic))
    if inp.hyp_len <= inp.ref_len:
        assert corrected == classic


@given(latency_inputs())
def test_ap_range_and_full_read(inp):
    ap = average_proportion(inp)
    assert 0 < ap <= 1
    assert (ap == 1.0) == all(d == inp.total_ms for d in inp.delays_ms)


@given(latency_inputs())
def test_dal_bounded_below_by_raw_lag(inp):
    r = inp.total_ms / inp.ref_len
    raw = sum(d - i * r for i, d in enumerate(inp.delays_ms)) / inp.hyp_len
    assert dal(inp) >= raw - TOL * max(1.0, abs(raw))


@settings(max_examples=200)
@given(latency_inputs(), st.integers(2, 9))
def test_time_scale_equivariance(inp, k):
    scaled = L([d * k for d in inp.delays_ms], inp.total_ms * k, inp.ref_len)
    for corrected in (False, True):
        assert average_lagging(scaled, corrected) == pytest.approx(
            k * average_lagging(inp, corrected), rel=TOL, abs=TOL
        )
    assert dal(scaled) == pytest.approx(k * dal(inp), rel=TOL, abs=TOL)
    assert average_proportion(scaled) == pytest.approx(average_proportion(inp), rel=TOL)

import pytest
from hypothesis import given, strategies as st

from smartbin.sensing import (
    MAX_RANGE_MM,
    Echo,
    Hysteresis,
    MedianFilter,
    distance_to_echo,
    echo_to_distance,
)


class TestEchoToDistance:
    def test_hand_evaluated_values(self):
        # 343 m/s * 292 us / 2 = 50.08 mm; 343 * 175e-6 / 2 = 30.01 mm
        assert echo_to_distance(Echo(292)) == 50
        assert echo_to_distance(Echo(175)) == 30

    def test_zero_time_zero_distance(self):
        assert echo_to_distance(Echo(0)) == 0

    def test_timeout_is_absent(self):
        assert echo_to_distance(None) is None

    def test_echo_rejects_out_of_range_times(self):
        with pytest.raises(ValueError):
            Echo(-1)
        with pytest.raises(ValueError):
            Echo(1_000_001)


class TestDistanceToEcho:
    def test_hand_evaluated_values(self):
        # 2 * 50 / 0.343 = 291.5 -> 292; 2 * 100 / 0.343 = 583.1 -> 583
        assert distance_to_echo(50) == 292
        assert distance_to_echo(100) == 583

    def test_zero(self):
        assert distance_to_echo(0) == 0

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            distance_to_echo(MAX_RANGE_MM + 1)
        with pytest.raises(ValueError):
            distance_to_echo(-1)

    def test_round_trip_within_quantization(self):
        for d in range(0, MAX_RANGE_MM + 1):
            back = echo_to_distance(Echo(distance_to_echo(d)))
            assert abs(back - d) <= 1, f"round trip drifted at {d} mm"

    @given(st.integers(0, 1_000_000), st.integers(0, 1_000_000))
    def test_monotonic_in_time(self, t1, t2):
        if t1 > t2:
            t1, t2 = t2, t1
        assert echo_to_distance(Echo(t1)) <= echo_to_distance(Echo(t2))

    @given(st.integers(0, MAX_RANGE_MM), st.integers(0, MAX_RANGE_MM))
    def test_monotonic_in_distance(self, d1, d2):
        if d1 > d2:
            d1, d2 = d2, d1
        assert distance_to_echo(d1) <= distance_to_echo(d2)


class TestMedianFilter:
    def test_rejects_even_or_nonpositive_window(self):
        with pytest.raises(ValueError):
            MedianFilter(4)
        with pytest.raises(ValueError):
            MedianFilter(0)

    def test_single_spike_is_ignored(self):
        f = MedianFilter(3)
        f.push(200)
        f.push(200)
        assert f.push(40) == 200

    def test_sustained_change_passes(self):
        f = MedianFilter(3)
        for sample in (200, 40, 40):
            f.push(sample)
        assert f.push(40) == 40

    def test_single_element(self):
        f = MedianFilter(3)
        assert f.push(75) == 75

    def test_current_matches_last_push(self):
        f = MedianFilter(3)
        for sample in (10, 30, 20):
            result = f.push(sample)
            assert f.current() == result

    def test_current_on_empty_raises(self):
        with pytest.raises(ValueError):
            MedianFilter(1).current()

    @given(st.lists(st.integers(0, MAX_RANGE_MM), min_size=1, max_size=30))
    def test_output_is_a_buffered_sample(self, samples):
        f = MedianFilter(5)
        for sample in samples:
            assert f.push(sample) in f.buf

    @given(
        st.integers(0, MAX_RANGE_MM),
        st.integers(0, MAX_RANGE_MM),
        st.integers(0, 10),
    )
    def test_outlier_in_constant_stream_never_shows(self, level, outlier, position):
        f = MedianFilter(3)
        for _ in range(3):
            f.push(level)
        for i in range(12):
            out = f.push(outlier if i == position else level)
            if i != position and i != position + 1:
                # buffer fully refilled with the constant level
                assert out == level
            else:
                assert out == level  # a lone outlier is always outvoted


class TestHysteresis:
    def test_boundary_inclusion_sets(self):
        h = Hysteresis(set_at=50, clear_at=60)
        assert h.update(50) is True

    def test_band_holds_state(self):
        h = Hysteresis(set_at=50, clear_at=60, active=True)
        assert h.update(55) is True

    def test_above_clear_releases(self):
        h = Hysteresis(set_at=50, clear_at=60, active=True)
        assert h.update(61) is False

    def test_band_holds_inactive_too(self):
        h = Hysteresis(set_at=50, clear_at=60, active=False)
        assert h.update(55) is False

    def test_rejects_clear_below_set(self):
        with pytest.raises(ValueError):
            Hysteresis(set_at=50, clear_at=40)

    @given(st.lists(st.integers(51, 60), min_size=1, max_size=50))
    def test_no_chatter_inside_band_after_activation(self, values):
        h = Hysteresis(set_at=50, clear_at=60)
        h.update(50)
        for value in values:
            assert h.update(value) is True

    @given(st.booleans(), st.integers(0, 50))
    def test_at_or_below_set_always_activates(self, active, value):
        h = Hysteresis(set_at=50, clear_at=60, active=active)
        assert h.update(value) is True

    @given(st.booleans(), st.integers(61, MAX_RANGE_MM))
    def test_above_clear_always_deactivates(self, active, value):
        h = Hysteresis(set_at=50, clear_at=60, active=active)
        assert h.update(value) is False

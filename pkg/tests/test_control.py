import random

import pytest
from hypothesis import given, settings, strategies as st

from smartbin.actuation import BIN_FULL, BinDistance
from smartbin.control import (
    ControlConfig,
    Controller,
    CycleInput,
    LidState,
    ReferenceController,
    SystemState,
    reference_oracle,
)
from smartbin.sensing import Echo

# Echo round trips for the distances used below (via distance_to_echo):
# 25 mm -> 146 us, 40 mm -> 233 us, 200 mm -> 1166 us
HAND_40 = Echo(233)
BIN_200 = Echo(1166)
BIN_25 = Echo(146)

IDLE_INPUT = CycleInput(hand_echo=None, bin_echo=BIN_200)


def degenerate_config() -> ControlConfig:
    """No filtering, no hysteresis band: direct threshold comparison."""
    return ControlConfig(median_window=1, hand_clear_mm=50, full_clear_mm=30)


class TestControlConfig:
    def test_defaults_match_prototype(self):
        cfg = ControlConfig()
        assert cfg.cycle_ms == 100
        assert cfg.hand_set_mm == 50
        assert cfg.full_set_mm == 30
        assert cfg.open_angle_deg == 180
        assert cfg.closed_angle_deg == 0

    def test_rejects_hand_clear_below_set(self):
        with pytest.raises(ValueError, match="hand_clear_mm"):
            ControlConfig(hand_set_mm=50, hand_clear_mm=40)

    def test_rejects_even_median_window(self):
        with pytest.raises(ValueError, match="median_window"):
            ControlConfig(median_window=4)

    def test_rejects_full_clear_below_set(self):
        with pytest.raises(ValueError, match="full_clear_mm"):
            ControlConfig(full_set_mm=30, full_clear_mm=20)

    def test_hand_and_full_thresholds_are_independent(self):
        # hand_set below full_set is allowed: separate sensors.
        ControlConfig(hand_set_mm=20, hand_clear_mm=25)


class TestControllerInit:
    def test_starts_idle_closed_not_full(self):
        c = Controller(ControlConfig())
        assert c.state is SystemState.IDLE
        assert c.lid is LidState.CLOSED
        assert c.bin_full is False
        assert c.cycle_count == 0

    def test_filters_seeded_to_max_range(self):
        c = Controller(ControlConfig())
        assert c.hand_filter.current() == 4000
        assert c.bin_filter.current() == 4000


class TestTick:
    def test_hand_approach_opens_on_second_tick(self):
        c = Controller(ControlConfig())
        outs = [c.tick(CycleInput(hand_echo=HAND_40, bin_echo=BIN_200)) for _ in range(3)]

        # tick 1: median {4000, 4000, 40} still reads max range
        assert outs[0].lid is LidState.CLOSED
        assert outs[0].servo_command_deg is None
        assert outs[0].filtered_hand_mm == 4000
        # tick 2: median {4000, 40, 40} crosses the 50 mm threshold
        assert outs[1].filtered_hand_mm == 40
        assert outs[1].servo_command_deg == 180
        assert outs[1].lid is LidState.OPEN
        assert outs[1].state is SystemState.OPEN
        # tick 3: held open, no repeated command
        assert outs[2].servo_command_deg is None
        assert outs[2].lid is LidState.OPEN

    def test_full_bin_locks_and_closes_open_lid(self):
        c = Controller(ControlConfig())
        for _ in range(3):
            c.tick(CycleInput(hand_echo=HAND_40, bin_echo=BIN_200))
        assert c.lid is LidState.OPEN

        outs = [c.tick(CycleInput(hand_echo=HAND_40, bin_echo=BIN_25)) for _ in range(3)]
        closing = [o for o in outs if o.servo_command_deg == 0]
        assert len(closing) == 1
        locked = closing[0]
        assert locked.bin_full is True
        assert locked.lid is LidState.CLOSED
        assert locked.state is SystemState.LOCKED
        assert locked.display == BIN_FULL
        assert outs[-1].state is SystemState.LOCKED

    def test_locked_ignores_hand(self):
        c = Controller(ControlConfig())
        for _ in range(3):
            c.tick(CycleInput(hand_echo=None, bin_echo=BIN_25))
        assert c.state is SystemState.LOCKED

        out = c.tick(CycleInput(hand_echo=HAND_40, bin_echo=BIN_25))
        assert out.lid is LidState.CLOSED
        assert out.servo_command_deg is None
        assert out.state is SystemState.LOCKED

    def test_hand_removed_closes_within_window(self):
        c = Controller(ControlConfig())
        for _ in range(3):
            c.tick(CycleInput(hand_echo=HAND_40, bin_echo=BIN_200))
        assert c.lid is LidState.OPEN

        outs = [c.tick(CycleInput(hand_echo=None, bin_echo=BIN_200)) for _ in range(3)]
        assert any(o.servo_command_deg == 0 for o in outs)
        assert outs[-1].lid is LidState.CLOSED
        assert outs[-1].state is SystemState.IDLE

    def test_bin_priority_over_hand_same_tick(self):
        # Both conditions satisfied on the same tick from closed: the hand is
        # never honored, the lid never opens.
        c = Controller(degenerate_config())
        out = c.tick(CycleInput(hand_echo=HAND_40, bin_echo=BIN_25))
        assert out.state is SystemState.LOCKED
        assert out.lid is LidState.CLOSED
        assert out.servo_command_deg is None

    def test_display_shows_filtered_bin_distance_when_not_full(self):
        c = Controller(degenerate_config())
        out = c.tick(CycleInput(hand_echo=None, bin_echo=BIN_200))
        assert out.display == BinDistance(200)

    def test_echo_beyond_timeout_reads_as_max_range(self):
        c = Controller(degenerate_config())
        out = c.tick(CycleInput(hand_echo=Echo(30_000), bin_echo=Echo(35_000)))
        assert out.filtered_hand_mm == 4000
        assert out.filtered_bin_mm == 4000
        assert out.state is SystemState.IDLE


def random_inputs(seed: int, n: int) -> list[CycleInput]:
    rng = random.Random(seed)

    def echo():
        if rng.random() < 0.2:
            return None
        return Echo(rng.randrange(0, 23_325))

    return [CycleInput(hand_echo=echo(), bin_echo=echo()) for _ in range(n)]


class TestSequenceProperties:
    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_commands_match_lid_transitions(self, seed):
        c = Controller(ControlConfig())
        previous = LidState.CLOSED
        for cycle in random_inputs(seed, 200):
            out = c.tick(cycle)
            if out.lid is not previous:
                assert out.servo_command_deg is not None
            else:
                assert out.servo_command_deg is None
            previous = out.lid

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_lockout_and_coherence(self, seed):
        c = Controller(ControlConfig())
        for cycle in random_inputs(seed, 200):
            out = c.tick(cycle)
            if out.bin_full:
                assert out.lid is LidState.CLOSED
                assert out.state is SystemState.LOCKED
            assert (out.state is SystemState.LOCKED) == out.bin_full
            if out.state is SystemState.OPEN:
                assert out.lid is LidState.OPEN

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_replay_is_deterministic(self, seed):
        inputs = random_inputs(seed, 100)
        first = [Controller(ControlConfig()).tick(i) for i in [inputs[0]]]
        a, b = Controller(ControlConfig()), Controller(ControlConfig())
        assert [a.tick(i) for i in inputs] == [b.tick(i) for i in inputs]
        assert first  # appease linters; determinism established above


class TestReferenceOracle:
    def test_single_hand_opens_immediately(self):
        outs = reference_oracle([CycleInput(hand_echo=HAND_40, bin_echo=BIN_200)], ControlConfig())
        assert len(outs) == 1
        assert outs[0].lid is LidState.OPEN
        assert outs[0].servo_command_deg == 180

    def test_single_full_bin_locks_immediately(self):
        outs = reference_oracle([CycleInput(hand_echo=None, bin_echo=BIN_25)], ControlConfig())
        assert outs[0].state is SystemState.LOCKED
        assert outs[0].display == BIN_FULL

    def test_empty_sequence(self):
        assert reference_oracle([], ControlConfig()) == []

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_degenerate_controller_matches_oracle(self, seed):
        cfg = degenerate_config()
        inputs = random_inputs(seed, 150)
        controller = Controller(cfg)
        reference = ReferenceController(cfg)
        for cycle in inputs:
            assert controller.tick(cycle) == reference.tick(cycle)

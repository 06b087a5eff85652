"""Bin-full-priority lid control: the Idle/Open/Locked state machine.

One `tick` consumes one cycle's raw sensor readings (nominally every 100 ms)
and decides lid, display, and servo command. Bin-level status is always
evaluated first; hand detection runs only while the bin-full lockout is
inactive, so a full bin can never be opened by a detected hand in the same
cycle. Servo commands are emitted only on lid transitions to avoid
repetitive PWM updates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .actuation import BIN_FULL, BinDistance, DisplayContent, ServoProfile
from .sensing import (
    MAX_RANGE_MM,
    EchoResult,
    Hysteresis,
    MedianFilter,
    Micros,
    Millimeters,
    echo_to_distance,
)


class SystemState(enum.Enum):
    IDLE = "Idle"
    OPEN = "Open"
    LOCKED = "Locked"


class LidState(enum.Enum):
    CLOSED = "Closed"
    OPEN = "Open"


@dataclass(frozen=True)
class CycleInput:
    """One cycle's raw measurements from both ultrasonic channels."""

    hand_echo: EchoResult
    bin_echo: EchoResult


@dataclass(frozen=True)
class CycleOutput:
    """Decisions and observability data produced by one control cycle.

    servo_command_deg is present only on a lid transition; filtered values
    render a timed-out measurement as the maximum range (4000 mm).
    """

    state: SystemState
    lid: LidState
    bin_full: bool
    servo_command_deg: int | None
    display: DisplayContent
    filtered_hand_mm: Millimeters
    filtered_bin_mm: Millimeters


@dataclass(frozen=True)
class ControlConfig:
    """All thresholds, timing, filter, and servo parameters in one record.

    Defaults follow the reference prototype: 100 ms control cycle, hand
    detection at 50 mm, bin-full at 30 mm, lid fully open at 180 degrees.
    Clear thresholds sit 10 mm above their set thresholds so readings that
    hover on a boundary do not chatter the lid.
    """

    cycle_ms: int = 100
    hand_set_mm: Millimeters = 50
    hand_clear_mm: Millimeters = 60
    full_set_mm: Millimeters = 30
    full_clear_mm: Millimeters = 40
    median_window: int = 3
    echo_timeout_us: Micros = 30_000
    open_angle_deg: int = 180
    closed_angle_deg: int = 0
    servo_profile: ServoProfile = field(default_factory=ServoProfile)
    servo_speed_deg_per_s: int = 600

    def __post_init__(self) -> None:
        if self.cycle_ms <= 0:
            raise ValueError(f"cycle_ms must be positive, got {self.cycle_ms}")
        for name in ("hand_set_mm", "hand_clear_mm", "full_set_mm", "full_clear_mm"):
            value = getattr(self, name)
            if not 0 <= value <= MAX_RANGE_MM:
                raise ValueError(f"{name} out of range [0, {MAX_RANGE_MM}]: {value}")
        if self.hand_clear_mm < self.hand_set_mm:
            raise ValueError(
                f"hand_clear_mm ({self.hand_clear_mm}) must be >= hand_set_mm ({self.hand_set_mm})"
            )
        if self.full_clear_mm < self.full_set_mm:
            raise ValueError(
                f"full_clear_mm ({self.full_clear_mm}) must be >= full_set_mm ({self.full_set_mm})"
            )
        if self.median_window < 1 or self.median_window % 2 == 0:
            raise ValueError(
                f"median_window must be an odd positive integer, got {self.median_window}"
            )
        if not 0 < self.echo_timeout_us <= 1_000_000:
            raise ValueError(f"echo_timeout_us out of range: {self.echo_timeout_us}")
        if not 0 < self.open_angle_deg <= 180:
            raise ValueError(f"open_angle_deg must be in (0, 180], got {self.open_angle_deg}")
        if not 0 <= self.closed_angle_deg <= 180:
            raise ValueError(f"closed_angle_deg must be in [0, 180], got {self.closed_angle_deg}")
        if self.closed_angle_deg == self.open_angle_deg:
            raise ValueError("closed_angle_deg must differ from open_angle_deg")
        if self.servo_speed_deg_per_s <= 0:
            raise ValueError(
                f"servo_speed_deg_per_s must be positive, got {self.servo_speed_deg_per_s}"
            )


def _distance_or_max(echo: EchoResult, timeout_us: Micros) -> Millimeters:
    # Fail-safe: a missed or overlong echo reads as maximum range, so it can
    # never trigger actuation or lockout.
    if echo is None or echo.round_trip_us >= timeout_us:
        return MAX_RANGE_MM
    distance = echo_to_distance(echo)
    assert distance is not None
    return min(distance, MAX_RANGE_MM)


class Controller:
    """Stateful control loop: call tick() once per cycle.

    Starts with the lid closed and the bin-full flag clear. Both median
    filters are seeded to maximum range so that an uninitialized sensor
    history reads as "no hand, bin not full" — with the default window of 3
    a genuine approach therefore takes two consecutive readings to act on,
    which is also what rejects single-sample spikes.

    Single-owner mutable state: tick() must not be called concurrently.
    """

    def __init__(self, config: ControlConfig) -> None:
        self.config = config
        self.hand_filter = MedianFilter(config.median_window)
        self.bin_filter = MedianFilter(config.median_window)
        for _ in range(config.median_window):
            self.hand_filter.push(MAX_RANGE_MM)
            self.bin_filter.push(MAX_RANGE_MM)
        self.hand_detect = Hysteresis(config.hand_set_mm, config.hand_clear_mm)
        self.bin_full_latch = Hysteresis(config.full_set_mm, config.full_clear_mm)
        self.lid = LidState.CLOSED
        self.cycle_count = 0

    @property
    def bin_full(self) -> bool:
        return self.bin_full_latch.active

    @property
    def state(self) -> SystemState:
        if self.bin_full:
            return SystemState.LOCKED
        if self.lid is LidState.OPEN:
            return SystemState.OPEN
        return SystemState.IDLE

    def tick(self, cycle: CycleInput) -> CycleOutput:
        """Run one control cycle: bin level first, then hand detection."""
        cfg = self.config
        prev_lid = self.lid

        bin_mm = _distance_or_max(cycle.bin_echo, cfg.echo_timeout_us)
        filtered_bin = self.bin_filter.push(bin_mm)
        full = self.bin_full_latch.update(filtered_bin)

        if full:
            # Lockout: close if needed, ignore the hand channel entirely.
            self.lid = LidState.CLOSED
            filtered_hand = self.hand_filter.current()
            display: DisplayContent = BIN_FULL
        else:
            hand_mm = _distance_or_max(cycle.hand_echo, cfg.echo_timeout_us)
            filtered_hand = self.hand_filter.push(hand_mm)
            hand_present = self.hand_detect.update(filtered_hand)
            if hand_present and self.lid is LidState.CLOSED:
                self.lid = LidState.OPEN
            elif not hand_present and self.lid is LidState.OPEN:
                self.lid = LidState.CLOSED
            display = BinDistance(filtered_bin)

        servo_command = None
        if self.lid is not prev_lid:
            servo_command = (
                cfg.open_angle_deg if self.lid is LidState.OPEN else cfg.closed_angle_deg
            )
        self.cycle_count += 1
        return CycleOutput(
            state=self.state,
            lid=self.lid,
            bin_full=full,
            servo_command_deg=servo_command,
            display=display,
            filtered_hand_mm=filtered_hand,
            filtered_bin_mm=filtered_bin,
        )


class ReferenceController:
    """Deliberately naive transcription of the control loop for differential tests.

    No filtering, no hysteresis: each cycle compares the raw distances
    directly against the set thresholds. With the real controller configured
    degenerately (median_window=1, clear thresholds equal to set thresholds)
    the two must agree on every input sequence.
    """

    def __init__(self, config: ControlConfig) -> None:
        self.config = config
        self.lid = LidState.CLOSED
        self.bin_full = False
        self.last_hand_mm: Millimeters = MAX_RANGE_MM

    def tick(self, cycle: CycleInput) -> CycleOutput:
        cfg = self.config
        prev_lid = self.lid

        bin_mm = _distance_or_max(cycle.bin_echo, cfg.echo_timeout_us)
        self.bin_full = bin_mm <= cfg.full_set_mm
        if self.bin_full:
            self.lid = LidState.CLOSED
            display: DisplayContent = BIN_FULL
        else:
            hand_mm = _distance_or_max(cycle.hand_echo, cfg.echo_timeout_us)
            self.last_hand_mm = hand_mm
            if hand_mm <= cfg.hand_set_mm:
                if self.lid is LidState.CLOSED:
                    self.lid = LidState.OPEN
            else:
                if self.lid is LidState.OPEN:
                    self.lid = LidState.CLOSED
            display = BinDistance(bin_mm)

        servo_command = None
        if self.lid is not prev_lid:
            servo_command = (
                cfg.open_angle_deg if self.lid is LidState.OPEN else cfg.closed_angle_deg
            )
        if self.bin_full:
            state = SystemState.LOCKED
        elif self.lid is LidState.OPEN:
            state = SystemState.OPEN
        else:
            state = SystemState.IDLE
        return CycleOutput(
            state=state,
            lid=self.lid,
            bin_full=self.bin_full,
            servo_command_deg=servo_command,
            display=display,
            filtered_hand_mm=self.last_hand_mm,
            filtered_bin_mm=bin_mm,
        )


def reference_oracle(
    raw_inputs: list[CycleInput] | tuple[CycleInput, ...], config: ControlConfig
) -> list[CycleOutput]:
    """Run the naive reference loop over a whole input sequence."""
    reference = ReferenceController(config)
    return [reference.tick(cycle) for cycle in raw_inputs]

"""Deterministic desk-scale simulation: world model, noisy echoes, servo travel.

Timing model
------------
The logical clock advances in whole control cycles; record k is stamped
t_ms = k * cycle_ms. The echo a tick consumes was acquired one cycle
earlier (trigger fired at the previous boundary, decision lands at this
one), so a ground-truth change at time t is first measured by the cycle at
t + cycle_ms. With the default median window of 3 that puts the actuation
command exactly two cycles after an on-grid stimulus. Records report the
servo angle as of their own timestamp; the motion model advances between
records, bounded by its speed.

Everything is a pure function of (scenario, config, noise model), so equal
inputs produce byte-identical traces.
"""

from __future__ import annotations

from dataclasses import dataclass

from .actuation import (
    SensorChannel,
    ServoProfile,
    angle_to_pulse,
    pulse_to_angle,
    render_display,
)
from .control import ControlConfig, Controller, CycleInput
from .rng import SplitMix64, channel_stream
from .scenario import Scenario
from .sensing import MAX_RANGE_MM, Echo, EchoResult, Millimeters, distance_to_echo
from .trace import TraceRecord


@dataclass(frozen=True)
class NoiseModel:
    """Measurement corruption: Gaussian distance noise plus echo dropout.

    sigma_mm = 0 and dropout_prob = 0 reproduce the noiseless world exactly.
    The seed pins the whole draw sequence; see :mod:`smartbin.rng`.
    """

    sigma_mm: int = 0
    dropout_prob: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma_mm < 0:
            raise ValueError(f"sigma_mm must be non-negative, got {self.sigma_mm}")
        if not 0.0 <= self.dropout_prob <= 1.0:
            raise ValueError(f"dropout_prob must be in [0, 1], got {self.dropout_prob}")


def synthesize_echo(
    true_mm: Millimeters | None, noise: NoiseModel, rng: SplitMix64
) -> EchoResult:
    """One measurement of a target at true_mm (None = nothing in range).

    Draw order is fixed: the dropout uniform is consumed only when
    dropout_prob > 0, the Gaussian only when sigma_mm > 0.
    """
    if true_mm is None:
        return None
    if noise.dropout_prob > 0 and rng.uniform() < noise.dropout_prob:
        return None
    sample = true_mm
    if noise.sigma_mm > 0:
        perturbed = true_mm + noise.sigma_mm * rng.gauss()
        sample = max(0, min(MAX_RANGE_MM, int(perturbed + 0.5) if perturbed >= 0 else 0))
    return Echo(distance_to_echo(sample))


class ServoMotionModel:
    """First-order servo travel: constant speed toward the target, no overshoot."""

    def __init__(self, initial_angle_deg: int = 0, speed_deg_per_s: int = 600) -> None:
        if speed_deg_per_s <= 0:
            raise ValueError(f"speed_deg_per_s must be positive, got {speed_deg_per_s}")
        self.current_angle_deg = initial_angle_deg
        self.target_angle_deg = initial_angle_deg
        self.speed_deg_per_s = speed_deg_per_s

    def command(self, angle_deg: int) -> None:
        self.target_angle_deg = angle_deg

    def advance(self, dt_ms: int) -> int:
        step = self.speed_deg_per_s * dt_ms // 1000
        delta = self.target_angle_deg - self.current_angle_deg
        if delta > 0:
            self.current_angle_deg += min(step, delta)
        elif delta < 0:
            self.current_angle_deg -= min(step, -delta)
        return self.current_angle_deg


class SimulatedPort:
    """Hardware port backed by the scripted world (see actuation.HardwarePort).

    The contract side (trigger_pulse / await_echo / set_servo_pulse /
    write_display) is what the control loop uses; set_world and advance_time
    are the physics side driven by the harness.
    """

    def __init__(
        self, noise: NoiseModel, servo: ServoMotionModel, profile: ServoProfile
    ) -> None:
        self._noise = noise
        self._servo = servo
        self._profile = profile
        self._rng = {
            SensorChannel.HAND: channel_stream(noise.seed, 1),
            SensorChannel.BIN: channel_stream(noise.seed, 2),
        }
        self._world: dict[SensorChannel, Millimeters | None] = {
            SensorChannel.HAND: None,
            SensorChannel.BIN: None,
        }
        self._captured: dict[SensorChannel, EchoResult] = {}
        self.display_line = ""
        self.servo_pulse_us = angle_to_pulse(servo.current_angle_deg, profile)

    # --- physics side -----------------------------------------------------

    def set_world(self, hand_mm: Millimeters | None, bin_mm: Millimeters) -> None:
        self._world[SensorChannel.HAND] = hand_mm
        self._world[SensorChannel.BIN] = bin_mm

    def advance_time(self, dt_ms: int) -> None:
        self._servo.advance(dt_ms)

    @property
    def servo_angle_deg(self) -> int:
        return self._servo.current_angle_deg

    # --- port contract ------------------------------------------------------

    def trigger_pulse(self, channel: SensorChannel) -> None:
        self._captured[channel] = synthesize_echo(
            self._world[channel], self._noise, self._rng[channel]
        )

    def await_echo(self, channel: SensorChannel) -> EchoResult:
        if channel not in self._captured:
            raise RuntimeError(f"await_echo without trigger_pulse on {channel.value}")
        return self._captured.pop(channel)

    def set_servo_pulse(self, pulse_us: int) -> None:
        self.servo_pulse_us = pulse_us
        self._servo.command(pulse_to_angle(pulse_us, self._profile))

    def write_display(self, text: str) -> None:
        self.display_line = text


def run_simulation(
    scenario: Scenario, config: ControlConfig, noise: NoiseModel
) -> list[TraceRecord]:
    """Drive the controller through the scenario, one record per control cycle."""
    controller = Controller(config)
    servo = ServoMotionModel(
        initial_angle_deg=config.closed_angle_deg,
        speed_deg_per_s=config.servo_speed_deg_per_s,
    )
    port = SimulatedPort(noise, servo, config.servo_profile)

    records: list[TraceRecord] = []
    cycle = 0
    t_ms = 0
    while t_ms < scenario.duration_ms:
        # Echoes consumed now were acquired at the previous cycle boundary.
        measured_hand, measured_bin = scenario.world_at(max(0, t_ms - config.cycle_ms))
        port.set_world(measured_hand, measured_bin)
        port.trigger_pulse(SensorChannel.HAND)
        hand_echo = port.await_echo(SensorChannel.HAND)
        port.trigger_pulse(SensorChannel.BIN)
        bin_echo = port.await_echo(SensorChannel.BIN)

        out = controller.tick(CycleInput(hand_echo=hand_echo, bin_echo=bin_echo))
        if out.servo_command_deg is not None:
            port.set_servo_pulse(angle_to_pulse(out.servo_command_deg, config.servo_profile))
        port.write_display(render_display(out.display))

        truth_hand, truth_bin = scenario.world_at(t_ms)
        records.append(
            TraceRecord(
                cycle=cycle,
                t_ms=t_ms,
                truth_hand_mm=truth_hand,
                truth_bin_mm=truth_bin,
                raw_hand=hand_echo,
                raw_bin=bin_echo,
                filtered_hand_mm=out.filtered_hand_mm,
                filtered_bin_mm=out.filtered_bin_mm,
                state=out.state,
                lid=out.lid,
                bin_full=out.bin_full,
                servo_command_deg=out.servo_command_deg,
                servo_angle_deg=port.servo_angle_deg,
                display=port.display_line,
            )
        )
        port.advance_time(config.cycle_ms)
        cycle += 1
        t_ms = cycle * config.cycle_ms
    return records

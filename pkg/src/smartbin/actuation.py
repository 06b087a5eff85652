"""Servo PWM mapping, display rendering, and the hardware port contract.

The port contract is the seam between the control logic and any physical or
simulated peripheral set: a backend provides exactly four capabilities
(trigger an ultrasonic ping, collect its echo, drive the servo pulse width,
write a display line). The simulator in :mod:`smartbin.sim` implements it;
an MCU port would bind the same four calls to real pins.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from .sensing import EchoResult, Micros, Millimeters


class SensorChannel(enum.Enum):
    """The two ultrasonic transducers: outside (hand) and inside (bin level)."""

    HAND = "hand"
    BIN = "bin"


@dataclass(frozen=True)
class ServoProfile:
    """Pulse-width calibration of the lid servo.

    Defaults are the common full-travel convention for SG90-class servos:
    50 Hz frame, 500 us at 0 degrees, 2500 us at 180 degrees.
    """

    pwm_period_us: Micros = 20_000
    min_pulse_us: Micros = 500
    max_pulse_us: Micros = 2_500

    def __post_init__(self) -> None:
        if not 0 < self.min_pulse_us < self.max_pulse_us < self.pwm_period_us:
            raise ValueError(
                "servo profile requires 0 < min_pulse_us < max_pulse_us < pwm_period_us, "
                f"got {self.min_pulse_us}/{self.max_pulse_us}/{self.pwm_period_us}"
            )


@dataclass(frozen=True)
class BinFull:
    """Display content shown while the lockout is active."""


@dataclass(frozen=True)
class BinDistance:
    """Display content during normal operation: measured bin distance."""

    mm: Millimeters


DisplayContent = BinFull | BinDistance

BIN_FULL = BinFull()


def angle_to_pulse(angle_deg: int, profile: ServoProfile) -> Micros:
    """Linear angle-to-pulse-width map over [0, 180] degrees, round-half-up.

    Endpoints are exact: 0 degrees gives min_pulse_us, 180 gives max_pulse_us.
    """
    if not 0 <= angle_deg <= 180:
        raise ValueError(f"servo angle out of range [0, 180]: {angle_deg}")
    span = profile.max_pulse_us - profile.min_pulse_us
    return (profile.min_pulse_us * 180 + angle_deg * span + 90) // 180


def pulse_to_angle(pulse_us: Micros, profile: ServoProfile) -> int:
    """Inverse of angle_to_pulse: decode a pulse width to an angle, clamped to [0, 180]."""
    span = profile.max_pulse_us - profile.min_pulse_us
    angle = (2 * (pulse_us - profile.min_pulse_us) * 180 + span) // (2 * span)
    return max(0, min(180, angle))


def pulse_to_duty(pulse_us: Micros, profile: ServoProfile) -> int:
    """Duty cycle of a pulse within the profile's PWM period, in parts per million.

    Exact integer arithmetic (round-half-up on the last digit), so two
    implementations can never drift on the same inputs.
    """
    if pulse_us > profile.pwm_period_us:
        raise ValueError(
            f"pulse ({pulse_us} us) exceeds PWM period ({profile.pwm_period_us} us)"
        )
    if pulse_us < 0:
        raise ValueError(f"pulse must be non-negative, got {pulse_us}")
    period = profile.pwm_period_us
    return (2 * pulse_us * 1_000_000 + period) // (2 * period)


def render_display(content: DisplayContent) -> str:
    """Render display content to the exact line shown on the status display."""
    if isinstance(content, BinFull):
        return "Bin Full"
    return f"Bin: {content.mm} mm"


@runtime_checkable
class HardwarePort(Protocol):
    """Abstract peripheral capabilities required by the control loop.

    Capability names and signatures are normative: the simulator and any
    future firmware binding must agree on them.
    """

    def trigger_pulse(self, channel: SensorChannel) -> None:
        """Fire the ultrasonic trigger on the given channel."""
        ...

    def await_echo(self, channel: SensorChannel) -> EchoResult:
        """Collect the echo for the most recent trigger (None on timeout)."""
        ...

    def set_servo_pulse(self, pulse_us: Micros) -> None:
        """Drive the servo PWM to the given pulse width and hold it."""
        ...

    def write_display(self, text: str) -> None:
        """Replace the display contents with the given line."""
        ...

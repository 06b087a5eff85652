"""Ultrasonic time-of-flight conversions and signal-conditioning primitives.

Distances are integer millimetres and times integer microseconds throughout;
the control path never touches floating point. Every rounding step is
round-half-up so traces are byte-reproducible across runs and platforms.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

# HC-SR04-class sensors are not usable much past 4 m; targets farther away
# come back as a timeout, never as a longer echo.
MAX_RANGE_MM = 4000

# No pulse or measurement in this system exceeds one second.
MAX_PULSE_US = 1_000_000

# Speed of sound in air at room temperature (343 m/s), in mm per microsecond.
SPEED_OF_SOUND_MM_PER_US = Fraction(343, 1000)

# Integer units used throughout the package.
Micros = int
Millimeters = int


@dataclass(frozen=True)
class Echo:
    """A captured ultrasonic round trip, in microseconds."""

    round_trip_us: Micros

    def __post_init__(self) -> None:
        if not 0 <= self.round_trip_us <= MAX_PULSE_US:
            raise ValueError(f"round_trip_us out of range: {self.round_trip_us}")


# A measurement either captured an echo or timed out waiting for one.
# None is the timeout ("no echo") case and is a value, not an error.
EchoResult = Echo | None


def _round_half_up(value: Fraction) -> int:
    # floor(value + 1/2) in exact integer arithmetic
    return (2 * value.numerator + value.denominator) // (2 * value.denominator)


def echo_to_distance(
    echo: EchoResult, speed: Fraction = SPEED_OF_SOUND_MM_PER_US
) -> Millimeters | None:
    """Convert a round-trip echo time to a one-way distance in mm.

    The pulse travels to the target and back, hence the halving. Returns
    None for a timed-out measurement; callers treat that as maximum range.
    """
    if echo is None:
        return None
    return _round_half_up(speed * echo.round_trip_us / 2)


def distance_to_echo(
    distance_mm: Millimeters, speed: Fraction = SPEED_OF_SOUND_MM_PER_US
) -> Micros:
    """Round-trip echo time for a target at the given distance.

    Inverse of echo_to_distance, used by the simulator to synthesize echoes.
    Distances beyond MAX_RANGE_MM are rejected; the simulator must emit a
    timeout for those instead.
    """
    if not 0 <= distance_mm <= MAX_RANGE_MM:
        raise ValueError(f"distance out of sensor range: {distance_mm} mm")
    return _round_half_up(Fraction(2 * distance_mm) / speed)


class MedianFilter:
    """Sliding median over the last `window` samples (window odd, >= 1).

    The output is always one of the buffered samples, so a single outlier
    in an otherwise steady stream never leaks through. While the buffer is
    still filling, the median of whatever is present is returned (upper
    middle element for even counts).
    """

    def __init__(self, window: int) -> None:
        if window < 1 or window % 2 == 0:
            raise ValueError(f"median window must be odd and >= 1, got {window}")
        self.window = window
        self.buf: deque[Millimeters] = deque(maxlen=window)

    def push(self, sample: Millimeters) -> Millimeters:
        """Append a sample (evicting the oldest when full) and return the median."""
        self.buf.append(sample)
        return self.current()

    def current(self) -> Millimeters:
        """Median of the buffered samples without pushing."""
        if not self.buf:
            raise ValueError("median filter is empty")
        ordered = sorted(self.buf)
        return ordered[len(ordered) // 2]


class Hysteresis:
    """Dual-threshold latch: assert at or below set_at, release above clear_at.

    Values inside (set_at, clear_at] hold the previous state, which keeps a
    reading that wobbles around a single boundary from chattering the output.
    """

    def __init__(self, set_at: Millimeters, clear_at: Millimeters, active: bool = False) -> None:
        if clear_at < set_at:
            raise ValueError(f"clear_at ({clear_at}) must be >= set_at ({set_at})")
        self.set_at = set_at
        self.clear_at = clear_at
        self.active = active

    def update(self, value: Millimeters) -> bool:
        if value <= self.set_at:
            self.active = True
        elif value > self.clear_at:
            self.active = False
        return self.active

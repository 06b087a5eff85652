"""Scripted ground-truth world: hand and bin distances over time.

A scenario is a piecewise-constant timeline per target. The file format is
one directive per line:

    <time_ms> hand <mm|none>    set ground-truth hand distance / remove hand
    <time_ms> bin <mm>          set ground-truth bin content distance
    duration <ms>               total simulated time (required, exactly once)

'#' starts a comment; blank lines are ignored. Until their first event,
the hand is absent and the bin reads 300 mm.
"""

from __future__ import annotations

from dataclasses import dataclass

from .actuation import SensorChannel
from .sensing import MAX_RANGE_MM, Millimeters

DEFAULT_BIN_MM = 300


class ScenarioError(ValueError):
    """Malformed scenario text or out-of-range query."""


@dataclass(frozen=True)
class ScenarioEvent:
    """One scripted change of ground truth. value None means hand removed."""

    at_ms: int
    target: SensorChannel
    value: Millimeters | None


@dataclass(frozen=True)
class Scenario:
    """Ordered events plus total duration; each target holds its last value."""

    events: tuple[ScenarioEvent, ...]
    duration_ms: int

    def world_at(self, t_ms: int) -> tuple[Millimeters | None, Millimeters]:
        """Ground truth (hand, bin) at time t_ms; an event at exactly t_ms applies."""
        if not 0 <= t_ms <= self.duration_ms:
            raise ScenarioError(
                f"time {t_ms} ms outside scenario duration [0, {self.duration_ms}]"
            )
        hand: Millimeters | None = None
        bin_mm: Millimeters = DEFAULT_BIN_MM
        for event in self.events:
            if event.at_ms > t_ms:
                break
            if event.target is SensorChannel.HAND:
                hand = event.value
            else:
                assert event.value is not None
                bin_mm = event.value
        return hand, bin_mm

    def change_times(self) -> list[int]:
        """Times at which ground truth actually changes (for attribution)."""
        times: list[int] = []
        hand: Millimeters | None = None
        bin_mm: Millimeters = DEFAULT_BIN_MM
        for event in self.events:
            if event.target is SensorChannel.HAND:
                changed = event.value != hand
                hand = event.value
            else:
                changed = event.value != bin_mm
                bin_mm = event.value if event.value is not None else bin_mm
            if changed:
                times.append(event.at_ms)
        return times


def _parse_mm(token: str, line_no: int) -> Millimeters:
    try:
        value = int(token)
    except ValueError:
        raise ScenarioError(f"line {line_no}: expected a distance in mm, got {token!r}") from None
    if not 0 <= value <= MAX_RANGE_MM:
        raise ScenarioError(
            f"line {line_no}: distance {value} mm outside [0, {MAX_RANGE_MM}]"
        )
    return value


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text; raises ScenarioError with the offending line number."""
    events: list[ScenarioEvent] = []
    duration: int | None = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()

        if tokens[0] == "duration":
            if len(tokens) != 2:
                raise ScenarioError(f"line {line_no}: expected 'duration <ms>'")
            if duration is not None:
                raise ScenarioError(f"line {line_no}: duplicate duration directive")
            try:
                duration = int(tokens[1])
            except ValueError:
                raise ScenarioError(
                    f"line {line_no}: duration must be an integer, got {tokens[1]!r}"
                ) from None
            if duration <= 0:
                raise ScenarioError(f"line {line_no}: duration must be positive")
            continue

        if len(tokens) != 3:
            raise ScenarioError(f"line {line_no}: expected '<time_ms> <hand|bin> <value>'")
        try:
            at_ms = int(tokens[0])
        except ValueError:
            raise ScenarioError(
                f"line {line_no}: expected a time in ms, got {tokens[0]!r}"
            ) from None
        if at_ms < 0:
            raise ScenarioError(f"line {line_no}: negative time {at_ms}")

        if tokens[1] == "hand":
            value = None if tokens[2] == "none" else _parse_mm(tokens[2], line_no)
            events.append(ScenarioEvent(at_ms, SensorChannel.HAND, value))
        elif tokens[1] == "bin":
            events.append(ScenarioEvent(at_ms, SensorChannel.BIN, _parse_mm(tokens[2], line_no)))
        else:
            raise ScenarioError(f"line {line_no}: unknown directive {tokens[1]!r}")

    if duration is None:
        raise ScenarioError("missing required 'duration <ms>' directive")

    # Stable sort keeps same-time events in file order.
    events.sort(key=lambda event: event.at_ms)
    return Scenario(events=tuple(events), duration_ms=duration)

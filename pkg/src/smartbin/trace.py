"""Per-cycle trace records and their text serializations.

Two formats carry the same fields in the same order:

* keyvalue — one record per line as space-separated `field=value` pairs;
  `display=` is always last and takes the rest of the line.
* csv — a fixed header row, then one comma-separated row per record.

Value tokens: a captured echo is `echo:<us>`, a timeout is `noecho`;
absent values (no hand, no servo command) are `none`; booleans are
`true`/`false`; states use their display names (Idle/Open/Locked, Closed/Open).
"""

from __future__ import annotations

from dataclasses import dataclass

from .control import LidState, SystemState
from .sensing import Echo, EchoResult, Millimeters

TRACE_FIELDS = (
    "cycle",
    "t_ms",
    "truth_hand_mm",
    "truth_bin_mm",
    "raw_hand",
    "raw_bin",
    "filtered_hand_mm",
    "filtered_bin_mm",
    "state",
    "lid",
    "bin_full",
    "servo_command_deg",
    "servo_angle_deg",
    "display",
)


class TraceError(ValueError):
    """Unparseable trace text."""


@dataclass(frozen=True)
class TraceRecord:
    """One control cycle: ground truth, measurements, decisions, actuator state."""

    cycle: int
    t_ms: int
    truth_hand_mm: Millimeters | None
    truth_bin_mm: Millimeters
    raw_hand: EchoResult
    raw_bin: EchoResult
    filtered_hand_mm: Millimeters
    filtered_bin_mm: Millimeters
    state: SystemState
    lid: LidState
    bin_full: bool
    servo_command_deg: int | None
    servo_angle_deg: int
    display: str


def _echo_token(echo: EchoResult) -> str:
    return "noecho" if echo is None else f"echo:{echo.round_trip_us}"


def _opt_token(value: int | None) -> str:
    return "none" if value is None else str(value)


def _record_tokens(record: TraceRecord) -> list[str]:
    return [
        str(record.cycle),
        str(record.t_ms),
        _opt_token(record.truth_hand_mm),
        str(record.truth_bin_mm),
        _echo_token(record.raw_hand),
        _echo_token(record.raw_bin),
        str(record.filtered_hand_mm),
        str(record.filtered_bin_mm),
        record.state.value,
        record.lid.value,
        "true" if record.bin_full else "false",
        _opt_token(record.servo_command_deg),
        str(record.servo_angle_deg),
        record.display,
    ]


def format_trace(records: list[TraceRecord], fmt: str = "keyvalue") -> str:
    """Serialize records to the requested format; one record per line."""
    if fmt == "keyvalue":
        lines = [
            " ".join(f"{name}={token}" for name, token in zip(TRACE_FIELDS, _record_tokens(r)))
            for r in records
        ]
    elif fmt == "csv":
        lines = [",".join(TRACE_FIELDS)]
        lines.extend(",".join(_record_tokens(r)) for r in records)
    else:
        raise ValueError(f"unknown trace format: {fmt!r}")
    return "".join(line + "\n" for line in lines)


def _parse_echo(token: str, line_no: int) -> EchoResult:
    if token == "noecho":
        return None
    if token.startswith("echo:"):
        try:
            return Echo(int(token[5:]))
        except ValueError:
            pass
    raise TraceError(f"line {line_no}: bad echo token {token!r}")


def _parse_int(token: str, line_no: int, name: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise TraceError(f"line {line_no}: bad integer for {name}: {token!r}") from None


def _parse_opt_int(token: str, line_no: int, name: str) -> int | None:
    return None if token == "none" else _parse_int(token, line_no, name)


_STATES = {s.value: s for s in SystemState}
_LIDS = {s.value: s for s in LidState}


def _record_from_tokens(tokens: list[str], line_no: int) -> TraceRecord:
    if len(tokens) != len(TRACE_FIELDS):
        raise TraceError(
            f"line {line_no}: expected {len(TRACE_FIELDS)} fields, got {len(tokens)}"
        )
    t = dict(zip(TRACE_FIELDS, tokens))
    if t["state"] not in _STATES:
        raise TraceError(f"line {line_no}: bad state {t['state']!r}")
    if t["lid"] not in _LIDS:
        raise TraceError(f"line {line_no}: bad lid {t['lid']!r}")
    if t["bin_full"] not in ("true", "false"):
        raise TraceError(f"line {line_no}: bad bin_full {t['bin_full']!r}")
    return TraceRecord(
        cycle=_parse_int(t["cycle"], line_no, "cycle"),
        t_ms=_parse_int(t["t_ms"], line_no, "t_ms"),
        truth_hand_mm=_parse_opt_int(t["truth_hand_mm"], line_no, "truth_hand_mm"),
        truth_bin_mm=_parse_int(t["truth_bin_mm"], line_no, "truth_bin_mm"),
        raw_hand=_parse_echo(t["raw_hand"], line_no),
        raw_bin=_parse_echo(t["raw_bin"], line_no),
        filtered_hand_mm=_parse_int(t["filtered_hand_mm"], line_no, "filtered_hand_mm"),
        filtered_bin_mm=_parse_int(t["filtered_bin_mm"], line_no, "filtered_bin_mm"),
        state=_STATES[t["state"]],
        lid=_LIDS[t["lid"]],
        bin_full=t["bin_full"] == "true",
        servo_command_deg=_parse_opt_int(t["servo_command_deg"], line_no, "servo_command_deg"),
        servo_angle_deg=_parse_int(t["servo_angle_deg"], line_no, "servo_angle_deg"),
        display=t["display"],
    )


def _keyvalue_tokens(line: str, line_no: int) -> list[str]:
    head, sep, display = line.partition(" display=")
    if not sep:
        raise TraceError(f"line {line_no}: missing display field")
    tokens: list[str] = []
    for pair in head.split():
        name, sep, value = pair.partition("=")
        if not sep:
            raise TraceError(f"line {line_no}: bad key=value pair {pair!r}")
        expected = TRACE_FIELDS[len(tokens)] if len(tokens) < len(TRACE_FIELDS) else None
        if name != expected:
            raise TraceError(f"line {line_no}: unexpected field {name!r}")
        tokens.append(value)
    tokens.append(display)
    return tokens


def parse_trace(text: str) -> list[TraceRecord]:
    """Parse either trace format back into records; empty input is an error."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise TraceError("empty trace")

    records: list[TraceRecord] = []
    if lines[0] == ",".join(TRACE_FIELDS):
        for line_no, line in enumerate(lines[1:], start=2):
            tokens = line.split(",", maxsplit=len(TRACE_FIELDS) - 1)
            records.append(_record_from_tokens(tokens, line_no))
    else:
        for line_no, line in enumerate(lines, start=1):
            records.append(_record_from_tokens(_keyvalue_tokens(line, line_no), line_no))
    if not records:
        raise TraceError("trace has a header but no records")
    return records

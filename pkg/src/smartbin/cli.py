"""Command-line entry point: simulate scenarios, score traces, verify invariants.

Commands:
    simulate   run a scenario file through the controller and write a trace
    metrics    score a trace against its scenario (response-time budget 800 ms)
    check      re-verify safety invariants over a trace file

Exit codes are a stable contract for CI: 0 success/pass, 1 check-or-budget
failure, 2 usage/IO/parse errors. Diagnostics go to stderr; data goes to
files or stdout.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, fields

from .control import ControlConfig, LidState
from .scenario import Scenario, ScenarioError, parse_scenario
from .sensing import Millimeters
from .sim import NoiseModel, run_simulation
from .trace import TraceError, TraceRecord, format_trace, parse_trace
from .actuation import ServoProfile

RESPONSE_BUDGET_MS = 800

# Lid transitions within this many cycles after a scripted change count as
# responses to it; anything else is chatter.
CHATTER_WINDOW_CYCLES = 3


class ConfigError(ValueError):
    """Malformed key=value config file."""


_PROFILE_KEYS = ("pwm_period_us", "min_pulse_us", "max_pulse_us")
_CONFIG_KEYS = tuple(
    f.name for f in fields(ControlConfig) if f.name != "servo_profile"
) + _PROFILE_KEYS


def load_config(text: str) -> ControlConfig:
    """Parse a flat key=value config; absent keys keep their defaults."""
    values: dict[str, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {raw!r}")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {line_no}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        try:
            values[key] = int(value)
        except ValueError:
            raise ConfigError(
                f"line {line_no}: value for {key} must be an integer, got {value!r}"
            ) from None

    profile_overrides = {k: values.pop(k) for k in _PROFILE_KEYS if k in values}
    try:
        profile = ServoProfile(**profile_overrides) if profile_overrides else ServoProfile()
        return ControlConfig(servo_profile=profile, **values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


@dataclass
class Metrics:
    """Trace-level scores: actuation counts, response latencies, chatter."""

    open_events: int = 0
    close_events: int = 0
    response_latencies_ms: list[int] = field(default_factory=list)
    lockout_entries: int = 0
    chatter_score: int = 0


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    first_bad_cycle: int | None = None


@dataclass(frozen=True)
class InvariantReport:
    """Outcome of every trace-level invariant check, pass or fail."""

    checks: tuple[CheckResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)


def _hand_inside(value: Millimeters | None, threshold: Millimeters) -> bool:
    return value is not None and value <= threshold


def _hand_arrivals(scenario: Scenario, hand_set_mm: Millimeters) -> list[int]:
    """Times at which the scripted hand enters detection range."""
    arrivals: list[int] = []
    previous: Millimeters | None = None
    for event in scenario.events:
        if event.target.value != "hand":
            continue
        if event.at_ms >= scenario.duration_ms:
            break
        if _hand_inside(event.value, hand_set_mm) and not _hand_inside(previous, hand_set_mm):
            arrivals.append(event.at_ms)
        previous = event.value
    return arrivals


def compute_metrics(
    records: list[TraceRecord], scenario: Scenario, config: ControlConfig
) -> Metrics:
    """Score a trace against its scenario.

    Response latency per hand appearance is the time from scripted arrival to
    the open servo command, plus the remaining servo travel to the open angle
    (read from the trace; estimated from the configured speed if the trace
    ends mid-travel).
    """
    metrics = Metrics()
    for record in records:
        if record.servo_command_deg == config.open_angle_deg:
            metrics.open_events += 1
        elif record.servo_command_deg is not None:
            metrics.close_events += 1

    previous_full = False
    for record in records:
        if record.bin_full and not previous_full:
            metrics.lockout_entries += 1
        previous_full = record.bin_full

    arrivals = _hand_arrivals(scenario, config.hand_set_mm)
    for i, arrival in enumerate(arrivals):
        window_end = arrivals[i + 1] if i + 1 < len(arrivals) else scenario.duration_ms
        command = next(
            (
                r
                for r in records
                if arrival <= r.t_ms < window_end
                and r.servo_command_deg == config.open_angle_deg
            ),
            None,
        )
        if command is None:
            continue
        reached = next(
            (
                r.t_ms
                for r in records
                if r.t_ms >= command.t_ms and r.servo_angle_deg == config.open_angle_deg
            ),
            None,
        )
        if reached is not None:
            latency = reached - arrival
        else:
            remaining = abs(config.open_angle_deg - command.servo_angle_deg)
            travel_ms = -(-remaining * 1000 // config.servo_speed_deg_per_s)
            latency = (command.t_ms - arrival) + travel_ms
        metrics.response_latencies_ms.append(latency)

    change_times = scenario.change_times()
    window_ms = CHATTER_WINDOW_CYCLES * config.cycle_ms
    previous_lid = LidState.CLOSED
    for record in records:
        if record.lid is not previous_lid:
            attributable = any(0 <= record.t_ms - t <= window_ms for t in change_times)
            if not attributable:
                metrics.chatter_score += 1
        previous_lid = record.lid
    return metrics


def check_trace(records: list[TraceRecord], config: ControlConfig) -> InvariantReport:
    """Run every trace-level invariant; the report lists each one even on success."""

    def first_failure(predicate) -> int | None:
        for record in records:
            if predicate(record):
                return record.cycle
        return None

    lockout_bad = first_failure(
        lambda r: r.bin_full
        and r.lid is LidState.OPEN
        and r.servo_command_deg != config.closed_angle_deg
    )

    dedup_bad: int | None = None
    previous_lid = LidState.CLOSED
    for record in records:
        transitioned = record.lid is not previous_lid
        expected = None
        if transitioned:
            expected = (
                config.open_angle_deg
                if record.lid is LidState.OPEN
                else config.closed_angle_deg
            )
        if record.servo_command_deg != expected:
            dedup_bad = record.cycle
            break
        previous_lid = record.lid

    def incoherent(record: TraceRecord) -> bool:
        if record.bin_full != (record.state.value == "Locked"):
            return True
        if record.state.value == "Open" and record.lid is not LidState.OPEN:
            return True
        if record.state.value == "Idle" and record.lid is LidState.OPEN:
            return True
        return False

    coherence_bad = first_failure(incoherent)

    motion_bad: int | None = None
    for previous, record in zip(records, records[1:]):
        dt_ms = record.t_ms - previous.t_ms
        bound = config.servo_speed_deg_per_s * dt_ms // 1000
        if abs(record.servo_angle_deg - previous.servo_angle_deg) > bound:
            motion_bad = record.cycle
            break

    return InvariantReport(
        checks=(
            CheckResult("lockout_safety", lockout_bad is None, lockout_bad),
            CheckResult("command_dedup", dedup_bad is None, dedup_bad),
            CheckResult("state_flag_coherence", coherence_bad is None, coherence_bad),
            CheckResult("servo_motion_bound", motion_bad is None, motion_bad),
        )
    )


# --- commands ---------------------------------------------------------------


def _read_text(path: str, what: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except FileNotFoundError:
        raise FileNotFoundError(f"{what} not found: {path}") from None


def _load_config_arg(path: str | None) -> ControlConfig:
    if path is None:
        return ControlConfig()
    return load_config(_read_text(path, "config"))


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = parse_scenario(_read_text(args.scenario, "scenario"))
    config = _load_config_arg(args.config)
    noise = NoiseModel(sigma_mm=args.sigma, dropout_prob=args.dropout, seed=args.seed)
    records = run_simulation(scenario, config, noise)
    text = format_trace(records, args.format)

    opens = sum(1 for r in records if r.servo_command_deg == config.open_angle_deg)
    closes = sum(
        1 for r in records if r.servo_command_deg not in (None, config.open_angle_deg)
    )
    summary = f"cycles={len(records)} open_events={opens} close_events={closes}"

    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    records = parse_trace(_read_text(args.trace, "trace"))
    scenario = parse_scenario(_read_text(args.scenario, "scenario"))
    config = _load_config_arg(args.config)

    expected_cycles = -(-scenario.duration_ms // config.cycle_ms)
    if len(records) != expected_cycles:
        raise TraceError(
            f"trace/scenario mismatch: {len(records)} records vs "
            f"{expected_cycles} cycles for duration {scenario.duration_ms} ms"
        )

    metrics = compute_metrics(records, scenario, config)
    latencies = metrics.response_latencies_ms
    print(f"cycles: {len(records)}")
    print(f"open_events: {metrics.open_events}")
    print(f"close_events: {metrics.close_events}")
    print(f"lockout_entries: {metrics.lockout_entries}")
    print(f"chatter_score: {metrics.chatter_score}")
    print(f"response_latencies_ms: {' '.join(map(str, latencies)) if latencies else '-'}")
    if latencies:
        print(f"mean_latency_ms: {sum(latencies) // len(latencies)}")
        print(f"max_latency_ms: {max(latencies)}")
    within = sum(1 for l in latencies if l <= RESPONSE_BUDGET_MS)
    print(f"open_success: {within}/{len(latencies)}")
    passed = within == len(latencies)
    print(f"budget_{RESPONSE_BUDGET_MS}ms: {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


def cmd_check(args: argparse.Namespace) -> int:
    records = parse_trace(_read_text(args.trace, "trace"))
    config = _load_config_arg(args.config)
    report = check_trace(records, config)
    for check in report.checks:
        if check.passed:
            print(f"{check.name}: PASS")
        else:
            print(f"{check.name}: FAIL (first offense at cycle {check.first_bad_cycle})")
    return 0 if report.all_passed else 1


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smartbin",
        description="Contactless waste-bin controller: scenario simulation and trace verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run a scenario and write a trace")
    simulate.add_argument("--scenario", required=True, help="scenario file path")
    simulate.add_argument("--config", help="key=value config file (defaults otherwise)")
    simulate.add_argument("--seed", type=_seed, default=0, help="noise RNG seed (u64)")
    simulate.add_argument("--sigma", type=int, default=0, help="distance noise sigma in mm")
    simulate.add_argument("--dropout", type=float, default=0.0, help="echo dropout probability")
    simulate.add_argument("--out", help="trace output path (stdout if omitted)")
    simulate.add_argument(
        "--format", choices=("keyvalue", "csv"), default="keyvalue", help="trace format"
    )
    simulate.set_defaults(func=cmd_simulate)

    metrics = sub.add_parser("metrics", help="score a trace against its scenario")
    metrics.add_argument("--trace", required=True, help="trace file path")
    metrics.add_argument("--scenario", required=True, help="scenario file path")
    metrics.add_argument("--config", help="config used to produce the trace")
    metrics.set_defaults(func=cmd_metrics)

    check = sub.add_parser("check", help="verify safety invariants over a trace")
    check.add_argument("--trace", required=True, help="trace file path")
    check.add_argument("--config", help="config used to produce the trace")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, TraceError, ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

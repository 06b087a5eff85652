"""Contactless waste-bin control with a deterministic simulation harness."""

from .actuation import (
    BIN_FULL,
    BinDistance,
    BinFull,
    DisplayContent,
    HardwarePort,
    SensorChannel,
    ServoProfile,
    angle_to_pulse,
    pulse_to_angle,
    pulse_to_duty,
    render_display,
)
from .control import (
    ControlConfig,
    Controller,
    CycleInput,
    CycleOutput,
    LidState,
    ReferenceController,
    SystemState,
    reference_oracle,
)
from .scenario import Scenario, ScenarioError, ScenarioEvent, parse_scenario
from .sensing import (
    MAX_RANGE_MM,
    Echo,
    EchoResult,
    Hysteresis,
    MedianFilter,
    distance_to_echo,
    echo_to_distance,
)
from .sim import NoiseModel, ServoMotionModel, SimulatedPort, run_simulation
from .trace import TraceError, TraceRecord, format_trace, parse_trace

__all__ = [
    "BIN_FULL",
    "BinDistance",
    "BinFull",
    "ControlConfig",
    "Controller",
    "CycleInput",
    "CycleOutput",
    "DisplayContent",
    "Echo",
    "EchoResult",
    "HardwarePort",
    "Hysteresis",
    "LidState",
    "MAX_RANGE_MM",
    "MedianFilter",
    "NoiseModel",
    "ReferenceController",
    "Scenario",
    "ScenarioError",
    "ScenarioEvent",
    "SensorChannel",
    "ServoMotionModel",
    "ServoProfile",
    "SimulatedPort",
    "SystemState",
    "TraceError",
    "TraceRecord",
    "angle_to_pulse",
    "distance_to_echo",
    "echo_to_distance",
    "format_trace",
    "parse_scenario",
    "parse_trace",
    "pulse_to_angle",
    "pulse_to_duty",
    "reference_oracle",
    "render_display",
    "run_simulation",
]

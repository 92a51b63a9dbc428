"""fluidlight: event-driven fluid-queue simulation of a signalized
intersection, with sample-path derivative estimation and adaptive-gain
set-point regulation of the congestion level."""

__version__ = "0.1.0"

from .controller import (
    ControllerConfig,
    ControllerState,
    CycleObservation,
    ScriptedPlant,
    SimulationPlant,
    gain,
    run_regulation,
    step,
)
from .config import ConfigError, ExperimentConfig, load_config
from .ipa import IpaResult, NonEmptyPeriodRecord, extract_periods, ipa_derivative, x_prime_at
from .kernel import BACKEND as KERNEL_BACKEND
from .oracle import FdReport, fd_report, finite_difference, trace_plant_curve
from .rates import (
    ArrivalConfig,
    ArrivalRealization,
    ServiceConfig,
    arrival_rate_at,
    generate_arrival,
    service_rate,
)
from .simulate import (
    PathEvent,
    PathSegment,
    SamplePath,
    performance,
    simulate_control_cycle,
    solve_empty_hit,
)

__all__ = [
    "ArrivalConfig", "ArrivalRealization", "ServiceConfig",
    "generate_arrival", "arrival_rate_at", "service_rate",
    "PathEvent", "PathSegment", "SamplePath",
    "simulate_control_cycle", "performance", "solve_empty_hit",
    "NonEmptyPeriodRecord", "IpaResult",
    "extract_periods", "x_prime_at", "ipa_derivative",
    "ControllerConfig", "ControllerState", "CycleObservation",
    "ScriptedPlant", "SimulationPlant", "gain", "step", "run_regulation",
    "FdReport", "finite_difference", "fd_report", "trace_plant_curve",
    "ExperimentConfig", "ConfigError", "load_config",
    "KERNEL_BACKEND",
]

"""Experiment configuration: a flat key=value text format.

The format is deliberately primitive: one `key = value` pair per line, blank
lines and #-comments allowed, no sections, no nesting.  Unknown keys are an
error so typos cannot silently fall back to defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .controller import ControllerConfig
from .rates import ArrivalConfig, ServiceConfig


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    cycle_length: float
    light_cycles: int
    arrival: ArrivalConfig
    service: ServiceConfig
    controller: ControllerConfig
    theta_initial: float
    n_control_cycles: int
    seed: int
    warm_start: bool
    output_dir: str | None = None

    @property
    def control_horizon(self) -> float:
        return self.light_cycles * self.cycle_length


_FLOAT_KEYS = (
    "cycle_length", "alpha_mean", "zeta", "off_max", "on_max", "beta_max",
    "ramp_rate", "set_point", "theta_min", "theta_max", "derivative_floor",
    "theta_initial",
)
_INT_KEYS = ("light_cycles", "n_control_cycles", "seed")
_BOOL_KEYS = ("warm_start",)
ALL_KEYS = frozenset(_FLOAT_KEYS + _INT_KEYS + _BOOL_KEYS)

_REQUIRED = frozenset((
    "cycle_length", "light_cycles", "alpha_mean", "zeta", "off_max", "on_max",
    "beta_max", "ramp_rate", "set_point", "theta_initial", "theta_min",
))

DEFAULT_DERIVATIVE_FLOOR = 1e-3
DEFAULT_N_CONTROL_CYCLES = 50
DEFAULT_SEED = 12345


def parse_config_text(text: str, source: str = "<string>") -> ExperimentConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in ALL_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(val)
            elif key in _BOOL_KEYS:
                if val.lower() in ("true", "1", "yes"):
                    values[key] = True
                elif val.lower() in ("false", "0", "no"):
                    values[key] = False
                else:
                    raise ValueError(val)
            else:
                values[key] = float(val)  # accepts 'inf' for ramp_rate
        except ValueError:
            raise ConfigError(
                f"{source}:{lineno}: bad value {val!r} for key {key!r}"
            ) from None

    missing = sorted(_REQUIRED - values.keys())
    if missing:
        raise ConfigError(f"{source}: missing required keys: {', '.join(missing)}")
    return _build(values, source)


def _check(cond: bool, key: str, msg: str, source: str):
    if not cond:
        raise ConfigError(f"{source}: invalid value for {key!r}: {msg}")


def _build(v: dict, source: str) -> ExperimentConfig:
    C = v["cycle_length"]
    _check(math.isfinite(C) and C > 0, "cycle_length", "must be > 0", source)
    _check(v["light_cycles"] >= 1, "light_cycles", "must be >= 1", source)
    _check(math.isfinite(v["alpha_mean"]) and v["alpha_mean"] > 0,
           "alpha_mean", "must be > 0", source)
    _check(0.0 <= v["zeta"] < 1.0, "zeta", "must lie in [0, 1)", source)
    _check(math.isfinite(v["off_max"]) and v["off_max"] >= 0,
           "off_max", "must be >= 0", source)
    _check(math.isfinite(v["on_max"]) and v["on_max"] > 0,
           "on_max", "must be > 0", source)
    _check(math.isfinite(v["beta_max"]) and v["beta_max"] > 0,
           "beta_max", "must be > 0", source)
    _check(not math.isnan(v["ramp_rate"]) and v["ramp_rate"] >= 0,
           "ramp_rate", "must be >= 0 (inf allowed)", source)
    _check(math.isfinite(v["set_point"]) and v["set_point"] > 0,
           "set_point", "must be > 0", source)

    theta_min = v["theta_min"]
    theta_max = v.get("theta_max", 0.9 * C)
    _check(0.0 <= theta_min, "theta_min", "must be >= 0", source)
    _check(theta_min < theta_max, "theta_max",
           f"must exceed theta_min={theta_min}", source)
    _check(theta_max <= C, "theta_max", f"must be <= cycle_length={C}", source)

    theta_initial = v["theta_initial"]
    _check(theta_min <= theta_initial <= theta_max, "theta_initial",
           f"must lie in [{theta_min}, {theta_max}]", source)

    floor = v.get("derivative_floor", DEFAULT_DERIVATIVE_FLOOR)
    _check(math.isfinite(floor) and floor > 0, "derivative_floor",
           "must be > 0", source)
    n_ctrl = v.get("n_control_cycles", DEFAULT_N_CONTROL_CYCLES)
    _check(n_ctrl >= 1, "n_control_cycles", "must be >= 1", source)

    return ExperimentConfig(
        cycle_length=C,
        light_cycles=v["light_cycles"],
        arrival=ArrivalConfig(
            mean_rate=v["alpha_mean"],
            relative_spread=v["zeta"],
            off_max=v["off_max"],
            on_max=v["on_max"],
        ),
        service=ServiceConfig(
            beta_max=v["beta_max"],
            ramp_rate=v["ramp_rate"],
            cycle_length=C,
        ),
        controller=ControllerConfig(
            set_point=v["set_point"],
            theta_min=theta_min,
            theta_max=theta_max,
            derivative_floor=floor,
        ),
        theta_initial=theta_initial,
        n_control_cycles=n_ctrl,
        seed=v.get("seed", DEFAULT_SEED),
        warm_start=v.get("warm_start", True),
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def with_overrides(cfg: ExperimentConfig, *, seed: int | None = None,
                   theta_initial: float | None = None,
                   zeta: float | None = None,
                   output_dir: str | None = None) -> ExperimentConfig:
    """Common experiment variations without re-parsing the file."""
    out = cfg
    if seed is not None:
        out = replace(out, seed=seed)
    if theta_initial is not None:
        out = replace(out, theta_initial=theta_initial)
    if zeta is not None:
        out = replace(out, arrival=replace(out.arrival, relative_spread=zeta))
    if output_dir is not None:
        out = replace(out, output_dir=output_dir)
    return out

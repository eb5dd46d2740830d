"""
Scenario configuration for the climate allocation simulator

A scenario is one scheme run over one building and one stretch of a day.
Configurations are plain JSON objects (schema in docs/CONFIG_SCHEMA.md);
ScenarioConfig.from_dict validates them and rejects unknown keys.

Usage:
    Set the default log level through the environment:
        export CLIMATE_SIM_LOG_LEVEL=DEBUG

    Or pass --log-level to simulate.py
"""

import json
import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from core.building_state import BuildingParams, Orientation, ResourceInput
from core.errors import ConfigError
from schemes.market_hc.bidding import DEFAULT_ALPHA, HcVariant

SIMULATOR_VERSION = "1.0.0"

LOG_LEVEL_ENV = "CLIMATE_SIM_LOG_LEVEL"
DEFAULT_LOG_LEVEL = "INFO"


class SchemeKind(Enum):
    """Allocation scheme of a scenario; values are the command line names"""
    CONTROL_A = "control-a"
    CONTROL_B = "control-b"
    MARKET_A = "market-a"
    MARKET_A_NO_MONEY = "market-a-no-money"
    MARKET_A_NO_TEMPERATURE = "market-a-no-temperature"
    MARKET_A_NO_AUCTION = "market-a-no-auction"
    MARKET_B_UNBOUNDED = "market-b-unbounded"
    MARKET_B_BOUNDED = "market-b-bounded"
    UNCONTROLLED = "uncontrolled"

    @property
    def code(self) -> int:
        """Stable index used to derive the scheme's random stream"""
        return list(SchemeKind).index(self)

    @property
    def is_hc_market(self) -> bool:
        return self.value.startswith("market-a")

    @classmethod
    def parse(cls, name: str) -> "SchemeKind":
        """Accepts command line names and enum names (control-a, ControlA, CONTROL_A)"""
        key = str(name).strip().lower().replace("_", "").replace("-", "")
        for kind in cls:
            if key == kind.value.replace("-", ""):
                return kind
        raise ConfigError(f"unknown scheme '{name}'", key="scheme")


class MeasurementTiming(Enum):
    """
    Which temperature the controller-form schemes read

    IMPLICIT: the temperature of the interval being decided, solved jointly
              with the physics
    DELAYED: the temperature of the previous interval, for every scheme
    """
    IMPLICIT = "implicit"
    DELAYED = "delayed"


# Which ingredients of the double-auction market each HC scheme keeps
HC_VARIANTS = {
    SchemeKind.MARKET_A: HcVariant.ORIGINAL,
    SchemeKind.MARKET_A_NO_MONEY: HcVariant.NO_MONEY,
    SchemeKind.MARKET_A_NO_TEMPERATURE: HcVariant.NO_TEMPERATURE,
    SchemeKind.MARKET_A_NO_AUCTION: HcVariant.NO_AUCTION,
}

PerOffice = Union[float, Tuple[float, ...]]


@dataclass
class ScenarioConfig:
    """
    Configuration of one simulation run

    Attributes:
        scheme: Allocation scheme
        building: Static building parameters
        beta: Gain of the integral controllers and of the equilibrium market
        alpha: HC market strength (None: scheme default)
        start_minute: First interval, minutes since midnight
        duration_minutes: Number of intervals
        initial_temperature: Starting temperature, scalar or per office
        setpoints: Setpoint, scalar or per office
        seed: Seed of both random streams
        eps: Equilibrium clearing tolerance
        measurement: Controller timing
        initial_control: "steady" or a fixed starting control signal
        utility: HC utility constants (u1, u2, u3)
    """
    scheme: SchemeKind = SchemeKind.CONTROL_A
    building: BuildingParams = field(default_factory=BuildingParams)
    beta: float = 10.0
    alpha: Optional[float] = None
    start_minute: int = 900
    duration_minutes: int = 240
    initial_temperature: PerOffice = 20.0
    setpoints: PerOffice = 20.0
    seed: int = 0
    eps: float = 1e-9
    measurement: MeasurementTiming = MeasurementTiming.IMPLICIT
    initial_control: Union[str, float] = "steady"
    utility: Tuple[float, float, float] = (20.0, 200.0, 2000.0)

    def __post_init__(self):
        if self.duration_minutes < 1:
            raise ConfigError("must be at least 1", key="duration")
        if self.start_minute < 0:
            raise ConfigError("must be non-negative", key="start_minute")
        if self.beta <= 0:
            raise ConfigError("must be positive", key="beta")
        if self.alpha is not None and self.alpha <= 0:
            raise ConfigError("must be positive", key="alpha")
        if self.eps <= 0:
            raise ConfigError("must be positive", key="eps")
        if not (0 <= self.seed < 2 ** 64):
            raise ConfigError("must be a 64-bit unsigned integer", key="seed")
        if isinstance(self.initial_control, str) and self.initial_control != "steady":
            raise ConfigError("must be 'steady' or a number", key="initial_control")
        if len(self.utility) != 3:
            raise ConfigError("expected [u1, u2, u3]", key="utility")
        self.utility = tuple(float(u) for u in self.utility)
        for key, value in (("initial_temperature", self.initial_temperature), ("setpoint", self.setpoints)):
            if not isinstance(value, (int, float)) and len(value) != self.building.n_offices:
                raise ConfigError(f"expected {self.building.n_offices} values", key=key)

    @property
    def effective_alpha(self) -> Optional[float]:
        if not self.scheme.is_hc_market:
            return None
        return self.alpha if self.alpha is not None else DEFAULT_ALPHA[HC_VARIANTS[self.scheme]]

    # =====================================================================
    # JSON SCHEMA
    # =====================================================================

    def to_dict(self) -> Dict[str, Any]:
        """Config in the JSON file schema, including the simulator version"""
        b = self.building
        return {
            "scheme": self.scheme.value,
            "offices": b.n_offices,
            "eta": b.eta,
            "resistance": _json_value(b.thermal_resistance),
            "capacitance": _json_value(b.thermal_capacitance),
            "f_min": b.f_min,
            "f_max": b.f_max,
            "resource": "unlimited" if b.resource_input.limit is None else b.resource_input.limit,
            "step_hours": b.step_hours,
            "orientations": [o.value for o in b.orientations],
            "pipe_order": list(b.pipe_order),
            "beta": self.beta,
            "alpha": self.alpha,
            "start_minute": self.start_minute,
            "duration": self.duration_minutes,
            "initial_temperature": _json_value(self.initial_temperature),
            "setpoint": _json_value(self.setpoints),
            "seed": self.seed,
            "eps": self.eps,
            "measurement": self.measurement.value,
            "initial_control": self.initial_control,
            "utility": list(self.utility),
            "simulator_version": SIMULATOR_VERSION,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScenarioConfig":
        """
        Build a config from the JSON schema; missing keys take defaults

        Raises:
            ConfigError: unknown key or invalid value (names the key)
        """
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        unknown = sorted(set(data) - CONFIG_KEYS)
        if unknown:
            raise ConfigError("unknown configuration key", key=unknown[0])

        building_args = {}
        if "offices" in data:
            building_args["n_offices"] = _integer(data, "offices")
        for key, attr in (("eta", "eta"), ("f_min", "f_min"), ("f_max", "f_max"), ("step_hours", "step_hours")):
            if key in data:
                building_args[attr] = _number(data, key)
        for key, attr in (("resistance", "thermal_resistance"), ("capacitance", "thermal_capacitance")):
            if key in data:
                building_args[attr] = _per_office(data, key)
        if "resource" in data:
            building_args["resource_input"] = parse_resource(data["resource"])
        if "orientations" in data:
            try:
                building_args["orientations"] = tuple(Orientation(str(o).lower()) for o in data["orientations"])
            except (ValueError, TypeError):
                raise ConfigError("entries must be east, south, west or north", key="orientations")
        if "pipe_order" in data:
            try:
                building_args["pipe_order"] = tuple(int(o) for o in data["pipe_order"])
            except (ValueError, TypeError):
                raise ConfigError("must be a list of office indices", key="pipe_order")

        args: Dict[str, Any] = {"building": BuildingParams(**building_args)}
        if "scheme" in data:
            args["scheme"] = SchemeKind.parse(data["scheme"])
        if "beta" in data:
            args["beta"] = _number(data, "beta")
        if data.get("alpha") is not None:
            args["alpha"] = _number(data, "alpha")
        if "start_minute" in data:
            args["start_minute"] = _integer(data, "start_minute")
        if "duration" in data:
            args["duration_minutes"] = _integer(data, "duration")
        if "initial_temperature" in data:
            args["initial_temperature"] = _per_office(data, "initial_temperature")
        if "setpoint" in data:
            args["setpoints"] = _per_office(data, "setpoint")
        if "seed" in data:
            args["seed"] = _integer(data, "seed")
        if "eps" in data:
            args["eps"] = _number(data, "eps")
        if "measurement" in data:
            try:
                args["measurement"] = MeasurementTiming(str(data["measurement"]).lower())
            except ValueError:
                raise ConfigError(f"unknown timing '{data['measurement']}'", key="measurement")
        if "initial_control" in data:
            value = data["initial_control"]
            args["initial_control"] = value if value == "steady" else _number(data, "initial_control")
        if "utility" in data:
            values = data["utility"]
            if not isinstance(values, (list, tuple)) or len(values) != 3:
                raise ConfigError("expected [u1, u2, u3]", key="utility")
            args["utility"] = tuple(_number({"utility": u}, "utility") for u in values)
        return cls(**args)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ScenarioConfig":
        return cls.from_dict(read_config_file(path))


CONFIG_KEYS = {
    "scheme", "offices", "eta", "resistance", "capacitance", "f_min", "f_max", "resource",
    "step_hours", "orientations", "pipe_order", "beta", "alpha", "start_minute", "duration",
    "initial_temperature", "setpoint", "seed", "eps", "measurement", "initial_control",
    "utility", "simulator_version",
}


# =========================================================================
# VALUE PARSING
# =========================================================================

def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a JSON config file

    Raises:
        ConfigError: malformed JSON or not an object
        OSError: unreadable file
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc.msg} (line {exc.lineno})")
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    return data


def parse_resource(value: Any) -> ResourceInput:
    """'unlimited' or a non-negative number"""
    if isinstance(value, str) and value.strip().lower() == "unlimited":
        return ResourceInput.unlimited()
    try:
        limit = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number or 'unlimited', got '{value}'", key="resource")
    if limit < 0:
        raise ConfigError("must be non-negative", key="resource")
    return ResourceInput.limited(limit)


def _number(data: Dict[str, Any], key: str) -> float:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", key=key)
    return float(value)


def _integer(data: Dict[str, Any], key: str) -> int:
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(f"expected an integer, got {value!r}", key=key)
    return value


def _per_office(data: Dict[str, Any], key: str) -> PerOffice:
    value = data[key]
    if isinstance(value, (list, tuple)):
        return tuple(_number({key: v}, key) for v in value)
    return _number(data, key)


def _json_value(value: PerOffice):
    return list(value) if isinstance(value, tuple) else value


# =========================================================================
# LOGGING LEVEL
# =========================================================================

def get_log_level(override: Optional[str] = None) -> int:
    """
    Log level from the command line or CLIMATE_SIM_LOG_LEVEL

    Invalid names fall back to INFO with a warning.
    """
    name = (override or os.getenv(LOG_LEVEL_ENV, DEFAULT_LOG_LEVEL)).upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        logging.getLogger(__name__).warning(f"⚠️  Invalid log level '{name}', defaulting to {DEFAULT_LOG_LEVEL}")
        return logging.INFO
    return level

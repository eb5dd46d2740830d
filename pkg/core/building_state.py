"""
BUILDING STATE - Office pipe parameters and per-interval physical records

Static description of the building (offices strung along one cold-air pipe)
plus the value types the physics produces every interval: the weather
sample and the power allocation along the pipe.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import ConfigError


class Orientation(Enum):
    """Facing of an office; selects its sun component"""
    EAST = "east"
    SOUTH = "south"
    WEST = "west"
    NORTH = "north"


@dataclass(frozen=True)
class ResourceInput:
    """
    Cooling power inserted at the pipe head

    limit=None means unlimited: the head behaves as an infinite supply and
    every office consumes exactly what it requests.
    """
    limit: Optional[float] = 140.0

    @classmethod
    def unlimited(cls) -> "ResourceInput":
        return cls(limit=None)

    @classmethod
    def limited(cls, value: float) -> "ResourceInput":
        return cls(limit=float(value))

    @property
    def is_limited(self) -> bool:
        return self.limit is not None

    @property
    def head_power(self) -> float:
        """Available power at the first office of the pipe"""
        return float("inf") if self.limit is None else self.limit

    def describe(self) -> str:
        return "unlimited" if self.limit is None else f"{self.limit:g}"


PerOffice = Union[float, Tuple[float, ...]]


def default_orientations(n_offices: int) -> Tuple[Orientation, ...]:
    """
    Equal contiguous split East / South / West / North

    With 100 offices: 0-24 East, 25-49 South, 50-74 West, 75-99 North.
    """
    order = (Orientation.EAST, Orientation.SOUTH, Orientation.WEST, Orientation.NORTH)
    groups = np.array_split(np.arange(n_offices), 4)
    facing = [Orientation.EAST] * n_offices
    for orientation, members in zip(order, groups):
        for o in members:
            facing[int(o)] = orientation
    return tuple(facing)


def _per_office(value, n_offices: int, key: str) -> PerOffice:
    if np.isscalar(value):
        return float(value)
    values = tuple(float(v) for v in value)
    if len(values) != n_offices:
        raise ConfigError(f"expected {n_offices} values, got {len(values)}", key=key)
    return values


@dataclass
class BuildingParams:
    """
    Static physical and topological parameters of the office pipe

    Attributes:
        n_offices: Number of offices N
        eta: Fraction of the locally available power an office can take
        thermal_resistance: R_o, scalar or one value per office
        thermal_capacitance: C_o, scalar or one value per office
        f_max: Upper bound of the control signal
        f_min: Lower bound of the control signal
        resource_input: Cooling power at the pipe head
        step_hours: Hours per interval s
        orientations: Facing per office (defaults to an equal split)
        pipe_order: Office indices in the order the air reaches them
    """
    n_offices: int = 100
    eta: float = 0.5
    thermal_resistance: PerOffice = 10.0
    thermal_capacitance: PerOffice = 10.0
    f_max: float = 3.0
    f_min: float = 0.0
    resource_input: ResourceInput = field(default_factory=ResourceInput)
    step_hours: float = 1.0 / 60.0
    orientations: Optional[Tuple[Orientation, ...]] = None
    pipe_order: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if int(self.n_offices) <= 0:
            raise ConfigError("must be positive", key="offices")
        self.n_offices = int(self.n_offices)
        if not 0.0 < self.eta <= 1.0:
            raise ConfigError("must lie in (0, 1]", key="eta")
        if self.f_min > self.f_max:
            raise ConfigError("f_min exceeds f_max", key="f_min")
        if self.step_hours <= 0:
            raise ConfigError("must be positive", key="step_hours")
        if self.resource_input.is_limited and self.resource_input.limit < 0:
            raise ConfigError("must be non-negative", key="resource")

        self.thermal_resistance = _per_office(self.thermal_resistance, self.n_offices, "resistance")
        self.thermal_capacitance = _per_office(self.thermal_capacitance, self.n_offices, "capacitance")
        if np.any(self.resistance_vector() <= 0):
            raise ConfigError("must be positive", key="resistance")
        if np.any(self.capacitance_vector() <= 0):
            raise ConfigError("must be positive", key="capacitance")

        if self.orientations is None:
            self.orientations = default_orientations(self.n_offices)
        else:
            self.orientations = tuple(Orientation(o) for o in self.orientations)
            if len(self.orientations) != self.n_offices:
                raise ConfigError(f"expected {self.n_offices} entries", key="orientations")

        if self.pipe_order is None:
            self.pipe_order = tuple(range(self.n_offices))
        else:
            self.pipe_order = tuple(int(o) for o in self.pipe_order)
            if sorted(self.pipe_order) != list(range(self.n_offices)):
                raise ConfigError("must be a permutation of 0..N-1", key="pipe_order")

    def resistance_vector(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.thermal_resistance, dtype=float), (self.n_offices,)).copy()

    def capacitance_vector(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.thermal_capacitance, dtype=float), (self.n_offices,)).copy()

    def pipe_order_array(self) -> np.ndarray:
        return np.asarray(self.pipe_order, dtype=int)

    def offices_facing(self, orientation: Orientation) -> np.ndarray:
        return np.array([o for o, f in enumerate(self.orientations) if f is orientation], dtype=int)

    def orientation_split(self) -> Dict[Orientation, int]:
        return {orientation: int(len(self.offices_facing(orientation))) for orientation in Orientation}


# =========================================================================
# PER-INTERVAL PHYSICAL RECORDS
# =========================================================================

@dataclass
class WeatherSample:
    """
    Weather of one interval

    virtual_temp[o] == outdoor + sun[orientation(o)] + fluct[o] exactly.
    """
    interval: int
    outdoor: float
    sun: Dict[Orientation, float]
    fluct: np.ndarray
    virtual_temp: np.ndarray


@dataclass
class PowerAllocation:
    """
    Result of walking the pipe once

    Arrays are indexed by office (not by pipe position).

    Attributes:
        available: P_avail seen by each office at its pipe position
        consumed: P_cons taken by each office
        outflow: Power left past the last office
        heat_in: P_heat = (T_virt - T) / R (filled after the temperature step)
    """
    available: np.ndarray
    consumed: np.ndarray
    outflow: float
    heat_in: Optional[np.ndarray] = None

    @property
    def total_consumed(self) -> float:
        return float(np.sum(self.consumed))

    def with_heat_in(self, heat: np.ndarray) -> "PowerAllocation":
        return replace(self, heat_in=np.asarray(heat, dtype=float))


def as_office_vector(value: Union[float, Sequence[float]], n_offices: int, key: str) -> np.ndarray:
    """Broadcast a scalar or per-office sequence to an array of length n_offices"""
    array = np.asarray(value, dtype=float)
    if array.ndim == 0:
        return np.full(n_offices, float(array))
    if array.shape != (n_offices,):
        raise ConfigError(f"expected {n_offices} values, got {array.size}", key=key)
    return array.copy()

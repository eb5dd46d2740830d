"""
INTEGRAL CONTROLLERS - Local (CONTROL-A) and global-data (CONTROL-B) schemes

Both accumulate the temperature error into the control signal with gain
beta and clamp to the actuator range. CONTROL-B subtracts the building-wide
average deviation so that, before clamping, corrections sum to zero.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from core.building_state import BuildingParams
from core.errors import ConfigError
from schemes.base import AllocationScheme, FeedbackLaw, SchemeDecision, StateSnapshot

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ControllerParams:
    """
    Attributes:
        gain: beta, error multiplier of the integral update
        f_min: Lower clamp bound
        f_max: Upper clamp bound
    """
    gain: float = 10.0
    f_min: float = 0.0
    f_max: float = 3.0

    def __post_init__(self):
        if self.gain <= 0:
            raise ConfigError("must be positive", key="beta")
        if self.f_min > self.f_max:
            raise ConfigError("f_min exceeds f_max", key="f_min")

    @classmethod
    def from_building(cls, gain: float, params: BuildingParams) -> "ControllerParams":
        return cls(gain=gain, f_min=params.f_min, f_max=params.f_max)


def control_a_update(f_prev, temp, setpoint, params: ControllerParams):
    """clamp(f_prev + beta*(temp - setpoint)); elementwise on arrays"""
    raw = f_prev + params.gain * (temp - setpoint)
    return np.clip(raw, params.f_min, params.f_max)


def control_b_raw(f_prev, temp, setpoint, mean_temp, mean_setpoint, params: ControllerParams):
    """CONTROL-B update before clamping"""
    return f_prev + params.gain * ((temp - setpoint) - (mean_temp - mean_setpoint))


def control_b_update(f_prev, temp, setpoint, mean_temp, mean_setpoint, params: ControllerParams):
    """clamp(f_prev + beta*((temp - setpoint) - (mean_temp - mean_setpoint)))"""
    return np.clip(control_b_raw(f_prev, temp, setpoint, mean_temp, mean_setpoint, params),
                   params.f_min, params.f_max)


def mean_deviation_term(gain: float, temperatures: np.ndarray, setpoints: np.ndarray) -> float:
    """beta times the average deviation, the global term of CONTROL-B"""
    return gain * float(np.mean(temperatures - setpoints))


# =========================================================================
# SCHEMES
# =========================================================================

class ControlAScheme(AllocationScheme):
    """Independent integral controller per office"""

    name = "control-a"

    def __init__(self, params: BuildingParams, rng: Optional[np.random.Generator] = None,
                 config: Optional[Dict] = None):
        super().__init__(params, rng, config)
        self.controller = ControllerParams.from_building(self.config['beta'], params)
        self.stats['clamped_updates'] = 0

    def _default_config(self) -> Dict:
        return {'beta': 10.0}

    def decide(self, snapshot: StateSnapshot) -> SchemeDecision:
        raw = snapshot.controls + self.controller.gain * snapshot.deviations
        controls = control_a_update(snapshot.controls, snapshot.temperatures, snapshot.setpoints,
                                    self.controller)
        self.stats['decisions'] += 1
        self.stats['clamped_updates'] += int(np.count_nonzero(raw != controls))
        return SchemeDecision(controls=controls)

    def feedback_law(self, snapshot: StateSnapshot,
                     open_loop: Optional[np.ndarray] = None) -> FeedbackLaw:
        n = snapshot.n_offices
        return FeedbackLaw(gain=np.full(n, self.controller.gain), weights=np.zeros(n))


class ControlBScheme(AllocationScheme):
    """Integral controller corrected by the building-wide average deviation"""

    name = "control-b"

    def __init__(self, params: BuildingParams, rng: Optional[np.random.Generator] = None,
                 config: Optional[Dict] = None):
        super().__init__(params, rng, config)
        self.controller = ControllerParams.from_building(self.config['beta'], params)
        self.stats['max_raw_imbalance'] = 0.0

    def _default_config(self) -> Dict:
        return {'beta': 10.0}

    def decide(self, snapshot: StateSnapshot) -> SchemeDecision:
        args = (snapshot.controls, snapshot.temperatures, snapshot.setpoints,
                snapshot.mean_temp, snapshot.mean_setpoint, self.controller)
        raw = control_b_raw(*args)
        imbalance = abs(float(np.sum(raw - snapshot.controls)))
        self.stats['max_raw_imbalance'] = max(self.stats['max_raw_imbalance'], imbalance)
        self.stats['decisions'] += 1
        return SchemeDecision(controls=control_b_update(*args))

    def feedback_law(self, snapshot: StateSnapshot,
                     open_loop: Optional[np.ndarray] = None) -> FeedbackLaw:
        n = snapshot.n_offices
        gain = self.controller.gain
        setpoints = snapshot.setpoints
        return FeedbackLaw(
            gain=np.full(n, gain),
            weights=np.ones(n),
            global_term=lambda temps: mean_deviation_term(gain, temps, setpoints),
        )

"""
THERMAL PROCESSOR - Office heat balance and the cold-air pipeline

Two pieces of physics:
- One-interval temperature update of an office modelled as an RC circuit
  driven by the virtual outdoor temperature and cooled by consumed power
- The sequential pipeline: cold air enters at the head, every office in
  pipe order takes at most a fraction eta of what is still available

Plus the per-office settle used by same-interval feedback: given a linear
control law F(T), find the consumption and temperature that are consistent
with each other under the pipeline cap.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from core.building_state import BuildingParams, PowerAllocation

logger = logging.getLogger(__name__)

# Tolerance of the conservation check along the pipe
CONSERVATION_TOL = 1e-12


# =========================================================================
# OFFICE DYNAMICS
# =========================================================================

def step_temperature(T_prev, T_virt, P_cons, R, C):
    """
    Advance office temperatures by one interval

    T = (1 / (1 + 1/(R*C))) * (T_prev + (T_virt/R - P_cons)/C)

    Works elementwise on scalars or numpy arrays.
    """
    return (1.0 / (1.0 + 1.0 / (R * C))) * (T_prev + (T_virt / R - P_cons) / C)


def steady_consumption(T, T_virt, R):
    """Consumption that keeps temperature T constant under T_virt"""
    return (T_virt - T) / R


def heat_in(T_virt, T, R):
    """Heat flowing into an office through its walls"""
    return (T_virt - T) / R


# =========================================================================
# PIPELINE
# =========================================================================

def pipeline_allocate(requests: np.ndarray, params: BuildingParams) -> PowerAllocation:
    """
    Walk the pipe once and convert requested control signals to consumption

    Args:
        requests: Requested F per office, indexed by office
        params: Building parameters (pipe order, eta, resource input)

    Returns:
        PowerAllocation indexed by office
    """
    requests = np.asarray(requests, dtype=float)
    available = np.zeros(params.n_offices)
    consumed = np.zeros(params.n_offices)

    remaining = params.resource_input.head_power
    for o in params.pipe_order:
        available[o] = remaining
        take = min(requests[o], params.eta * remaining)
        consumed[o] = take
        remaining -= take

    if params.resource_input.is_limited:
        leak = params.resource_input.limit - float(np.sum(consumed)) - remaining
        if abs(leak) > CONSERVATION_TOL * max(1.0, params.resource_input.limit):
            logger.warning(f"pipeline conservation off by {leak:.3e}")

    return PowerAllocation(available=available, consumed=consumed, outflow=remaining)


# =========================================================================
# SAME-INTERVAL SETTLE
# =========================================================================

@dataclass(frozen=True)
class SettledOffice:
    """Consistent (consumption, temperature, request) of one office"""
    consumed: float
    temperature: float
    request: float


def settle_office(T_prev: float, T_virt: float, R: float, C: float,
                  f_prev: float, gain: float, setpoint: float, offset: float,
                  f_min: float, f_max: float, cap: float) -> SettledOffice:
    """
    Solve one office's same-interval loop

    The request follows F(T) = clamp(f_prev + gain*(T - setpoint) - offset,
    f_min, f_max), consumption is P = min(F(T), cap) and the temperature
    T = c - k*P comes from the office dynamics. P is a clamp of a decreasing
    linear function of itself, so the fixed point is the interior solution
    clamped into [min(f_min, cap), min(f_max, cap)].
    """
    a = 1.0 / (1.0 + 1.0 / (R * C))
    k = a / C
    c = a * (T_prev + T_virt / (R * C))

    interior = (f_prev - offset + gain * (c - setpoint)) / (1.0 + gain * k)
    low = min(f_min, cap)
    high = min(f_max, cap)
    consumed = min(max(interior, low), high)

    temperature = c - k * consumed
    request = min(max(f_prev + gain * (temperature - setpoint) - offset, f_min), f_max)
    return SettledOffice(consumed=consumed, temperature=temperature, request=request)


class ThermalProcessor:
    """
    Applies the physics of one interval to the whole building

    Keeps running statistics of consumption and pipe outflow the way the
    rest of the pipeline keeps per-run counters.
    """

    def __init__(self, params: BuildingParams, config: Optional[Dict] = None):
        self.params = params
        self.config = config or self._default_config()
        self.resistance = params.resistance_vector()
        self.capacitance = params.capacitance_vector()

        self.stats = {
            'intervals': 0,
            'total_consumed': 0.0,
            'saturated_intervals': 0,     # some office capped by the pipe
            'max_outflow': 0.0,
        }

    def _default_config(self) -> Dict:
        return {
            'saturation_tol': 1e-12,
        }

    def steady_controls(self, temperatures: np.ndarray, virtual_temp: np.ndarray) -> np.ndarray:
        """Control signals that hold the given temperatures, clamped to the F bounds"""
        steady = steady_consumption(temperatures, virtual_temp, self.resistance)
        return np.clip(steady, self.params.f_min, self.params.f_max)

    def advance(self, temperatures: np.ndarray, virtual_temp: np.ndarray,
                requests: np.ndarray):
        """
        Allocate the requests along the pipe and step every office

        Returns:
            (new temperatures, PowerAllocation with heat_in filled)
        """
        allocation = pipeline_allocate(requests, self.params)
        new_temps = step_temperature(temperatures, virtual_temp, allocation.consumed,
                                     self.resistance, self.capacitance)
        allocation = allocation.with_heat_in(heat_in(virtual_temp, new_temps, self.resistance))

        self.stats['intervals'] += 1
        self.stats['total_consumed'] += allocation.total_consumed
        if np.any(allocation.consumed < np.asarray(requests) - self.config['saturation_tol']):
            self.stats['saturated_intervals'] += 1
        if np.isfinite(allocation.outflow):
            self.stats['max_outflow'] = max(self.stats['max_outflow'], allocation.outflow)
        return new_temps, allocation

    def get_statistics(self) -> Dict:
        return dict(self.stats)

"""
COUPLED SOLVER - Same-interval solve of a feedback law and the physics

A controller that reads the temperature of the interval it is deciding
closes an algebraic loop: the control signal sets consumption, consumption
sets the temperature, the temperature sets the control signal. For linear
laws the loop is solved in two layers:

- inner: walk the pipe in order, settling each office against the power
  still available (closed form, see settle_office)
- outer: a scalar root search over the one term shared by all offices
  (an average deviation or a price), using scipy's brentq
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy.optimize import brentq

from core.building_state import BuildingParams
from core.errors import BracketNotFoundError
from processors.thermal_processor import settle_office
from schemes.base import FeedbackLaw, StateSnapshot

logger = logging.getLogger(__name__)


@dataclass
class SettledState:
    """
    Attributes:
        temperatures: Temperature per office consistent with the law
        requests: Control signal per office the law produces at those temperatures
        consumed: Consumption per office along the pipe
        shared_term: Solved value of the term shared by all offices
        iterations: Root-search function evaluations (0 when no search ran)
    """
    temperatures: np.ndarray
    requests: np.ndarray
    consumed: np.ndarray
    shared_term: float
    iterations: int = 0


class CoupledSolver:
    """Solves one interval of a linear feedback law jointly with the pipe"""

    def __init__(self, params: BuildingParams, config: Optional[Dict] = None):
        self.params = params
        self.config = {**self._default_config(), **(config or {})}
        self.resistance = params.resistance_vector()
        self.capacitance = params.capacitance_vector()

        self.stats = {
            'solves': 0,
            'root_searches': 0,
            'function_evaluations': 0,
        }

    def _default_config(self) -> Dict:
        return {
            'xtol': 1e-13,
            'initial_width': 1.0,
            'max_doublings': 64,
        }

    # =====================================================================
    # INNER LAYER
    # =====================================================================

    def settle(self, law: FeedbackLaw, snapshot: StateSnapshot, virtual_temp: np.ndarray,
               shared_term: float) -> SettledState:
        """Walk the pipe once with the shared term held fixed"""
        params = self.params
        n = snapshot.n_offices
        temperatures = np.zeros(n)
        requests = np.zeros(n)
        consumed = np.zeros(n)

        remaining = params.resource_input.head_power
        for o in params.pipe_order:
            office = settle_office(
                T_prev=snapshot.temperatures[o], T_virt=virtual_temp[o],
                R=self.resistance[o], C=self.capacitance[o],
                f_prev=snapshot.controls[o], gain=law.gain[o], setpoint=snapshot.setpoints[o],
                offset=law.weights[o] * shared_term,
                f_min=params.f_min, f_max=params.f_max, cap=params.eta * remaining,
            )
            temperatures[o] = office.temperature
            requests[o] = office.request
            consumed[o] = office.consumed
            remaining -= office.consumed

        return SettledState(temperatures=temperatures, requests=requests,
                            consumed=consumed, shared_term=shared_term)

    def open_loop(self, snapshot: StateSnapshot, virtual_temp: np.ndarray) -> np.ndarray:
        """Temperatures of this interval with every control held at its previous value"""
        zeros = np.zeros(snapshot.n_offices)
        held = FeedbackLaw(gain=zeros, weights=zeros)
        return self.settle(held, snapshot, virtual_temp, 0.0).temperatures

    # =====================================================================
    # OUTER LAYER
    # =====================================================================

    def _bracket(self, fn, center: float):
        width = self.config['initial_width']
        for _ in range(self.config['max_doublings'] + 1):
            lo, hi = center - width, center + width
            if fn(lo) * fn(hi) <= 0.0:
                return lo, hi
            width *= 2.0
        raise BracketNotFoundError()

    def solve(self, law: FeedbackLaw, snapshot: StateSnapshot,
              virtual_temp: np.ndarray) -> SettledState:
        """
        Consistent temperatures for one interval

        Args:
            law: Linear law of the scheme
            snapshot: Previous temperatures and control signals
            virtual_temp: Virtual temperature of this interval

        Raises:
            BracketNotFoundError: root search could not bracket the shared term
        """
        self.stats['solves'] += 1
        if law.global_term is None and not law.zero_sum:
            return self.settle(law, snapshot, virtual_temp, 0.0)

        if law.global_term is not None:
            def mismatch(term: float) -> float:
                settled = self.settle(law, snapshot, virtual_temp, term)
                return term - law.global_term(settled.temperatures)
            center = law.global_term(snapshot.temperatures)
        else:
            def mismatch(term: float) -> float:
                settled = self.settle(law, snapshot, virtual_temp, term)
                return float(np.sum(settled.requests - snapshot.controls))
            center = 0.0

        lo, hi = self._bracket(mismatch, center)
        term, info = brentq(mismatch, lo, hi, xtol=self.config['xtol'], maxiter=200,
                            full_output=True, disp=False)
        if not info.converged:
            logger.warning(f"interval {snapshot.interval}: shared term search did not converge")

        self.stats['root_searches'] += 1
        self.stats['function_evaluations'] += int(info.function_calls)
        settled = self.settle(law, snapshot, virtual_temp, float(term))
        settled.iterations = int(info.function_calls)
        return settled

    def get_statistics(self) -> Dict:
        return dict(self.stats)

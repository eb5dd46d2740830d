"""
Shared scheme interface

Every allocation scheme turns a snapshot of the building (temperatures,
setpoints, previous control signals) into a new control-signal vector. The
simulation engine owns the state and the order of operations; schemes are
stateless apart from their statistics counters and the scheme RNG stream.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional

import numpy as np

from core.building_state import BuildingParams

logger = logging.getLogger(__name__)


@dataclass
class StateSnapshot:
    """
    What a scheme sees when it decides

    Attributes:
        interval: Interval index being decided
        temperatures: Temperature per office the decision is based on
        setpoints: Setpoint per office
        controls: Control signals of the previous interval
    """
    interval: int
    temperatures: np.ndarray
    setpoints: np.ndarray
    controls: np.ndarray

    @property
    def n_offices(self) -> int:
        return int(self.temperatures.size)

    @property
    def mean_temp(self) -> float:
        return float(np.mean(self.temperatures))

    @property
    def mean_setpoint(self) -> float:
        return float(np.mean(self.setpoints))

    @property
    def deviations(self) -> np.ndarray:
        return self.temperatures - self.setpoints

    def with_temperatures(self, temperatures: np.ndarray) -> "StateSnapshot":
        return replace(self, temperatures=np.asarray(temperatures, dtype=float))


@dataclass
class SchemeDecision:
    """
    Outcome of one scheme step

    Attributes:
        controls: New control signal per office
        price: Clearing price (markets that held a clearing this interval)
        transfers: Money paid per office at the clearing price (MARKET-B)
        details: Free-form per-step diagnostics
    """
    controls: np.ndarray
    price: Optional[float] = None
    transfers: Optional[np.ndarray] = None
    details: Dict = field(default_factory=dict)


@dataclass(frozen=True)
class FeedbackLaw:
    """
    Linear per-office control law used for same-interval solving

    F_o(T) = clamp(F_prev_o + gain_o*(T_o - setpoint_o) - weight_o*lam, f_min, f_max)

    lam is a scalar shared by all offices. With global_term set, lam must
    equal global_term(T). With zero_sum set, lam is the price making
    sum(F - F_prev) vanish. With neither, lam is 0.
    """
    gain: np.ndarray
    weights: np.ndarray
    global_term: Optional[Callable[[np.ndarray], float]] = None
    zero_sum: bool = False


class AllocationScheme(ABC):
    """
    Base class of all schemes

    Subclasses implement decide(); schemes whose rule is a linear function
    of the current temperature also expose feedback_law() so the engine can
    solve the rule and the physics of the same interval together.

    needs_open_loop: feedback_law() wants the temperatures the interval
        would reach with every control held at its previous value
    conserves_total: the scheme never changes the sum of the control signals
    """

    name = "scheme"
    reports_price = False
    needs_open_loop = False
    conserves_total = False

    def __init__(self, params: BuildingParams, rng: Optional[np.random.Generator] = None,
                 config: Optional[Dict] = None):
        self.params = params
        self.rng = rng
        self.config = {**self._default_config(), **(config or {})}
        self.stats = {'decisions': 0}

    def _default_config(self) -> Dict:
        return {}

    @abstractmethod
    def decide(self, snapshot: StateSnapshot) -> SchemeDecision:
        """New control signals from the given snapshot"""

    def feedback_law(self, snapshot: StateSnapshot,
                     open_loop: Optional[np.ndarray] = None) -> Optional[FeedbackLaw]:
        """Linear law for same-interval solving, None if the scheme has none"""
        return None

    def decide_settled(self, snapshot: StateSnapshot, settled) -> SchemeDecision:
        """
        Decision once the same-interval solve has settled

        settled carries the consistent temperatures and the law's requests.
        The default re-runs decide() on the settled temperatures, which
        reproduces the requests for schemes whose rule is the law itself.
        """
        return self.decide(snapshot.with_temperatures(settled.temperatures))

    def clamp(self, controls: np.ndarray) -> np.ndarray:
        return np.clip(controls, self.params.f_min, self.params.f_max)

    def get_statistics(self) -> Dict:
        return dict(self.stats)


class UncontrolledScheme(AllocationScheme):
    """No cooling at all (zero control, clamped into the F bounds)"""

    name = "uncontrolled"

    def decide(self, snapshot: StateSnapshot) -> SchemeDecision:
        self.stats['decisions'] += 1
        return SchemeDecision(controls=self.clamp(np.zeros(snapshot.n_offices)))

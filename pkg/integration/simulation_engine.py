"""
SIMULATION ENGINE - Scenario orchestration for the allocation schemes

Per interval:
    weather -> scheme decision -> pipeline allocation -> temperature step -> measure

Controller-form schemes (integral controllers, equilibrium market) read
the temperature of the interval they decide when measurement timing is
implicit; the rule and the physics are then solved together by the
CoupledSolver. The no-auction HC variant is solved the same way, its volume
split taken at the open-loop temperatures of the interval; the auction
variants always decide from the previous interval's temperatures.
"""

# Fix Python path to allow imports from parent directory
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.scenario_config import (
    HC_VARIANTS, SIMULATOR_VERSION, MeasurementTiming, ScenarioConfig, SchemeKind, parse_resource,
)
from core.building_state import as_office_vector
from core.errors import ClimateSimError, ComparisonMismatchError, ConfigError, ScenarioStepError
from core.measure import StepMeasure, WindowSummary, stddev_deviation, summarize_window, window_mean
from core.random_streams import RunStreams
from integration.coupled_solver import CoupledSolver
from processors.thermal_processor import ThermalProcessor
from processors.weather_processor import WeatherProcessor, deterministic_virtual_temp
from schemes.base import AllocationScheme, StateSnapshot, UncontrolledScheme
from schemes.control.integral_controller import ControlAScheme, ControlBScheme
from schemes.market_eq.equilibrium_market import MarketBScheme
from schemes.market_hc.auctioneer import MarketHcScheme

logger = logging.getLogger(__name__)


def build_scheme(config: ScenarioConfig, rng: np.random.Generator) -> AllocationScheme:
    """Instantiate the scheme a config names"""
    kind = config.scheme
    params = config.building
    if kind is SchemeKind.CONTROL_A:
        return ControlAScheme(params, rng, {'beta': config.beta})
    if kind is SchemeKind.CONTROL_B:
        return ControlBScheme(params, rng, {'beta': config.beta})
    if kind in HC_VARIANTS:
        return MarketHcScheme(params, rng, {
            'variant': HC_VARIANTS[kind].value,
            'alpha': config.effective_alpha,
            'utility': config.utility,
        })
    if kind in (SchemeKind.MARKET_B_UNBOUNDED, SchemeKind.MARKET_B_BOUNDED):
        return MarketBScheme(params, rng, {
            'beta': config.beta,
            'bounded': kind is SchemeKind.MARKET_B_BOUNDED,
            'eps': config.eps,
        })
    return UncontrolledScheme(params, rng)


# ============================================================================
#  TRACE
# ============================================================================

@dataclass
class StepRecord:
    """
    One simulated interval

    Attributes:
        interval: Interval index since midnight
        minute: Wall-clock minute since midnight
        temperatures: Temperature per office at the end of the interval
        controls: Control signal per office used in the interval
        consumed: Consumed power per office
        available: Power available per office at its pipe position
        heat_in: Heat flowing in per office
        virtual_temp: Virtual temperature per office (weather)
        price: Clearing price, None when no clearing took place
        transfers: Money per office at the clearing price (equilibrium market)
        measure: Spread of the deviation from the setpoint
    """
    interval: int
    minute: int
    temperatures: np.ndarray
    controls: np.ndarray
    consumed: np.ndarray
    available: np.ndarray
    heat_in: np.ndarray
    virtual_temp: np.ndarray
    price: Optional[float]
    transfers: Optional[np.ndarray]
    measure: StepMeasure


@dataclass
class SimTrace:
    """Records of one run plus the config and version that produced it"""
    config: ScenarioConfig
    records: List[StepRecord] = field(default_factory=list)
    setpoints: Optional[np.ndarray] = None
    version: str = SIMULATOR_VERSION
    statistics: Dict = field(default_factory=dict)

    @property
    def measures(self) -> List[StepMeasure]:
        return [r.measure for r in self.records]

    @property
    def scheme_name(self) -> str:
        return self.config.scheme.value

    def first_interval(self) -> int:
        return self.records[0].interval

    def end_interval(self) -> int:
        return self.records[-1].interval + 1

    def window_mean(self, from_interval: Optional[int] = None, to_interval: Optional[int] = None) -> float:
        return window_mean(self.measures,
                           self.first_interval() if from_interval is None else from_interval,
                           self.end_interval() if to_interval is None else to_interval)

    def summary(self, from_interval: Optional[int] = None, to_interval: Optional[int] = None) -> WindowSummary:
        abs_errors = [float(np.max(np.abs(r.temperatures - self.setpoints))) for r in self.records]
        consumption = [float(np.sum(r.consumed)) for r in self.records]
        return summarize_window(self.measures,
                                self.first_interval() if from_interval is None else from_interval,
                                self.end_interval() if to_interval is None else to_interval,
                                abs_errors=abs_errors, consumption=consumption)

    def temperature_matrix(self) -> np.ndarray:
        return np.array([r.temperatures for r in self.records])

    def control_matrix(self) -> np.ndarray:
        return np.array([r.controls for r in self.records])

    def to_frame(self, per_office: bool = False) -> pd.DataFrame:
        """One row per interval: minute, scheme, stddev, mean_deviation, price[, T_o...]"""
        frame = pd.DataFrame({
            'minute': [r.minute for r in self.records],
            'scheme': self.scheme_name,
            'stddev': [r.measure.stddev for r in self.records],
            'mean_deviation': [r.measure.mean_deviation for r in self.records],
            'price': [np.nan if r.price is None else r.price for r in self.records],
        })
        if per_office:
            temps = pd.DataFrame(self.temperature_matrix(),
                                 columns=[f"T_{o}" for o in range(self.config.building.n_offices)])
            frame = pd.concat([frame, temps], axis=1)
        return frame


# ============================================================================
#  ENGINE
# ============================================================================

class SimulationEngine:
    """
    Runs one scenario

    The engine owns all mutable state of a run (temperatures, control
    signals, both random streams); schemes only see snapshots.
    """

    def __init__(self, config: ScenarioConfig, weather_config: Optional[Dict] = None):
        self.config = config
        self.params = config.building
        self.logger = logging.getLogger(f"ClimateSim.{config.scheme.value}")

        self.streams = RunStreams(config.seed, config.scheme.code)
        self.weather = WeatherProcessor(self.params, self.streams.weather, weather_config)
        self.thermal = ThermalProcessor(self.params)
        self.solver = CoupledSolver(self.params)
        self.scheme = build_scheme(config, self.streams.scheme)

        n = self.params.n_offices
        self.setpoints = as_office_vector(config.setpoints, n, "setpoint")
        self.temperatures = as_office_vector(config.initial_temperature, n, "initial_temperature")

        self.intervals_per_minute = 1.0 / (60.0 * self.params.step_hours)
        self.start_interval = int(round(config.start_minute * self.intervals_per_minute))
        self.n_intervals = max(1, int(round(config.duration_minutes * self.intervals_per_minute)))
        self.controls = self._initial_controls()

    def _initial_controls(self) -> np.ndarray:
        value = self.config.initial_control
        if value != "steady":
            return np.clip(np.full(self.params.n_offices, float(value)), self.params.f_min, self.params.f_max)

        virtual = deterministic_virtual_temp(self.params, self.start_interval)
        controls = self.thermal.steady_controls(self.temperatures, virtual)
        limit = self.params.resource_input.limit
        total = float(np.sum(controls))
        if self.scheme.conserves_total and limit is not None and total > limit:
            # sum(F) is conserved from here on
            self.logger.info(f"⚠️  steady start scaled from sum(F) {total:.3f} to the resource {limit:g}")
            controls = np.clip(controls * (limit / total), self.params.f_min, self.params.f_max)
        return controls

    def _decide(self, snapshot: StateSnapshot, virtual_temp: np.ndarray):
        law = None
        if self.config.measurement is MeasurementTiming.IMPLICIT:
            open_loop = None
            if self.scheme.needs_open_loop:
                open_loop = self.solver.open_loop(snapshot, virtual_temp)
            law = self.scheme.feedback_law(snapshot, open_loop)
        if law is None:
            return self.scheme.decide(snapshot)
        settled = self.solver.solve(law, snapshot, virtual_temp)
        return self.scheme.decide_settled(snapshot, settled)

    def step(self, i: int) -> StepRecord:
        """Simulate interval i and advance the state"""
        weather = self.weather.sample(i)
        snapshot = StateSnapshot(interval=i, temperatures=self.temperatures.copy(),
                                 setpoints=self.setpoints, controls=self.controls.copy())
        try:
            decision = self._decide(snapshot, weather.virtual_temp)
        except (ClimateSimError, ValueError, ArithmeticError) as exc:
            raise ScenarioStepError(i, exc) from exc

        temperatures, allocation = self.thermal.advance(self.temperatures, weather.virtual_temp,
                                                        decision.controls)
        measure = stddev_deviation(temperatures, self.setpoints, interval=i)

        self.temperatures = temperatures
        self.controls = decision.controls
        self.logger.debug(f"interval {i}: stddev {measure.stddev:.4f} mean deviation {measure.mean_deviation:.4f}")
        return StepRecord(
            interval=i,
            minute=int(round(i / self.intervals_per_minute)),
            temperatures=temperatures,
            controls=decision.controls,
            consumed=allocation.consumed,
            available=allocation.available,
            heat_in=allocation.heat_in,
            virtual_temp=weather.virtual_temp,
            price=decision.price,
            transfers=decision.transfers,
            measure=measure,
        )

    def run(self) -> SimTrace:
        cfg = self.config
        self.logger.info(
            f"▶️  {cfg.scheme.value}: {self.params.n_offices} offices, resource "
            f"{self.params.resource_input.describe()}, intervals {self.start_interval}"
            f"..{self.start_interval + self.n_intervals - 1}, seed {cfg.seed}"
        )
        trace = SimTrace(config=cfg, setpoints=self.setpoints.copy())
        for i in range(self.start_interval, self.start_interval + self.n_intervals):
            trace.records.append(self.step(i))

        trace.statistics = self.get_statistics()
        self.logger.info(f"✅ {cfg.scheme.value}: window mean stddev {trace.window_mean():.5f} °C")
        return trace

    def get_statistics(self) -> Dict:
        return {
            'scheme': self.scheme.get_statistics(),
            'thermal': self.thermal.get_statistics(),
            'weather': self.weather.get_statistics(),
            'solver': self.solver.get_statistics(),
        }


def run_scenario(config: ScenarioConfig, weather_config: Optional[Dict] = None) -> SimTrace:
    """
    Run one scenario

    Raises:
        ScenarioStepError: a scheme failed; carries the failing interval
    """
    return SimulationEngine(config, weather_config).run()


# ============================================================================
#  COMPARISONS AND SWEEPS
# ============================================================================

@dataclass
class Comparison:
    """Traces of several schemes over the same weather, plus their summary table"""
    traces: List[SimTrace]
    table: pd.DataFrame
    window: Tuple[int, int]


def _check_comparable(configs: Sequence[ScenarioConfig]):
    if not configs:
        raise ComparisonMismatchError("nothing to compare")
    first = configs[0]
    for cfg in configs[1:]:
        if cfg.building != first.building:
            raise ComparisonMismatchError(f"{cfg.scheme.value}: building differs from {first.scheme.value}")
        if cfg.seed != first.seed:
            raise ComparisonMismatchError(f"{cfg.scheme.value}: seed {cfg.seed} differs from {first.seed}")
        if (cfg.start_minute, cfg.duration_minutes) != (first.start_minute, first.duration_minutes):
            raise ComparisonMismatchError(f"{cfg.scheme.value}: time window differs from {first.scheme.value}")


def summary_row(trace: SimTrace, window: Tuple[int, int]) -> Dict:
    summary = trace.summary(*window)
    stats = trace.statistics.get('scheme', {})
    return {
        'scheme': trace.scheme_name,
        'alpha': trace.config.effective_alpha,
        'window_mean_stddev': summary.mean_stddev,
        'max_stddev': summary.max_stddev,
        'mean_deviation': summary.mean_deviation,
        'max_abs_error': summary.max_abs_error,
        'mean_total_consumption': summary.mean_total_consumption,
        'auctions': stats.get('auctions'),
        'rationed_auctions': stats.get('rationed_auctions'),
    }


def run_comparison(configs: Sequence[ScenarioConfig], window: Optional[Tuple[int, int]] = None,
                   workers: int = 1) -> Comparison:
    """
    Run schemes side by side over identical weather

    Args:
        configs: Scenarios sharing building, seed and time window
        window: Half-open interval window for the summary (default: whole run)
        workers: Threads used to run members concurrently

    Raises:
        ComparisonMismatchError: configs do not share building, seed or time window
    """
    configs = list(configs)
    _check_comparable(configs)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(run_scenario, configs))
    else:
        traces = [run_scenario(cfg) for cfg in configs]

    if window is None:
        window = (traces[0].first_interval(), traces[0].end_interval())
    table = pd.DataFrame([summary_row(trace, window) for trace in traces])
    return Comparison(traces=traces, table=table, window=window)


SWEEP_PARAMETERS = ("resource", "beta", "alpha", "rc")


def with_parameter(config: ScenarioConfig, parameter: str, value) -> ScenarioConfig:
    """Copy of config with one swept parameter replaced"""
    if parameter == "resource":
        return replace(config, building=replace(config.building, resource_input=parse_resource(value)))
    if parameter == "beta":
        return replace(config, beta=float(value))
    if parameter == "alpha":
        return replace(config, alpha=float(value))
    if parameter == "rc":
        return replace(config, building=replace(config.building, thermal_resistance=float(value),
                                                thermal_capacitance=float(value)))
    raise ConfigError(f"unknown sweep parameter '{parameter}'", key="sweep")


def run_sweep(config: ScenarioConfig, parameter: str, values: Sequence,
              window: Optional[Tuple[int, int]] = None) -> Tuple[List[SimTrace], pd.DataFrame]:
    """Run one scheme for each value of a parameter; returns traces and a summary table"""
    traces = [run_scenario(with_parameter(config, parameter, value)) for value in values]
    rows = []
    for value, trace in zip(values, traces):
        span = window or (trace.first_interval(), trace.end_interval())
        rows.append({'parameter': parameter, 'value': str(value), **summary_row(trace, span)})
    return traces, pd.DataFrame(rows)

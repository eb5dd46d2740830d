"""
MEASURE - Standard deviation of the deviation from the setpoint

The single performance figure every scheme is judged by, plus window
summaries used to compare schemes over the same stretch of a day.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from core.errors import EmptyWindowError, NoOfficesError


@dataclass(frozen=True)
class StepMeasure:
    """
    Measure of one interval

    Attributes:
        interval: Interval index i
        stddev: Population stddev of (T_o - T_o^setp) around its mean, °C
        mean_deviation: <T_i> - <T^setp>, °C
    """
    interval: int
    stddev: float
    mean_deviation: float


def stddev_deviation(temps, setpoints, interval: int = 0) -> StepMeasure:
    """
    Evaluate the measure for one interval

    Uses the population (1/N) normalization. Shifting every temperature by a
    constant leaves the result unchanged.

    Raises:
        NoOfficesError: if there are no offices
        ValueError: if the vectors differ in length
    """
    temps = np.asarray(temps, dtype=float)
    setpoints = np.asarray(setpoints, dtype=float)
    if temps.size == 0:
        raise NoOfficesError()
    if temps.shape != setpoints.shape:
        raise ValueError(f"length mismatch: {temps.size} temperatures, {setpoints.size} setpoints")

    deviation = temps - setpoints
    mean_deviation = float(np.mean(temps) - np.mean(setpoints))
    stddev = float(np.sqrt(np.mean((deviation - mean_deviation) ** 2)))
    return StepMeasure(interval=interval, stddev=stddev, mean_deviation=mean_deviation)


def _window(trace: Sequence[StepMeasure], from_interval: int, to_interval: int) -> np.ndarray:
    selected = [m for m in trace if from_interval <= m.interval < to_interval]
    if not selected:
        raise EmptyWindowError(f"no records in window [{from_interval}, {to_interval})")
    return np.array([[m.stddev, m.mean_deviation] for m in selected])


def window_mean(trace: Sequence[StepMeasure], from_interval: int, to_interval: int) -> float:
    """
    Arithmetic mean of the stddev over the half-open window [from, to)

    Raises:
        EmptyWindowError: if no record falls in the window
    """
    return float(np.mean(_window(trace, from_interval, to_interval)[:, 0]))


@dataclass(frozen=True)
class WindowSummary:
    """Summary of one scheme over one window"""
    mean_stddev: float
    max_stddev: float
    mean_deviation: float
    max_abs_error: float
    mean_total_consumption: float
    records: int


def summarize_window(trace: Sequence[StepMeasure], from_interval: int, to_interval: int,
                     abs_errors: Sequence[float] = (), consumption: Sequence[float] = ()) -> WindowSummary:
    """
    Window statistics beyond the mean stddev

    abs_errors / consumption are per-record max |T - T^setp| and total P_cons
    aligned with trace; either may be empty.
    """
    values = _window(trace, from_interval, to_interval)
    mask = np.array([from_interval <= m.interval < to_interval for m in trace])
    abs_errors = np.asarray(abs_errors, dtype=float)
    consumption = np.asarray(consumption, dtype=float)
    return WindowSummary(
        mean_stddev=float(np.mean(values[:, 0])),
        max_stddev=float(np.max(values[:, 0])),
        mean_deviation=float(np.mean(values[:, 1])),
        max_abs_error=float(np.max(abs_errors[mask])) if abs_errors.size else float("nan"),
        mean_total_consumption=float(np.mean(consumption[mask])) if consumption.size else float("nan"),
        records=int(values.shape[0]),
    )

"""
WEATHER PROCESSOR - Diurnal outdoor temperature, sun load and wind noise

Produces the virtual temperature that drives every office:

    T_virt[o] = T_outdoor + T_sun[orientation(o)] + T_fluct[o]

Time is measured in intervals since midnight; with s hours per interval the
hour of day is i * s (taken modulo 24 with the non-negative modulus so
early-morning phases wrap around correctly).
"""

import logging
from typing import Dict, Optional

import numpy as np

from core.building_state import BuildingParams, Orientation, WeatherSample

logger = logging.getLogger(__name__)


# =========================================================================
# DETERMINISTIC COMPONENTS
# =========================================================================

def _hour_of_day(i: int, s: float, shift: float = 0.0) -> float:
    # np.mod follows the sign of the divisor, so the result is in [0, 24)
    return float(np.mod(i * s + shift, 24.0))


def outdoor_temp(i: int, s: float) -> float:
    """
    Outdoor temperature, varying between 22 °C (04:00) and 35 °C (16:00)

    Args:
        i: Interval index (intervals since midnight)
        s: Hours per interval

    Returns:
        Outdoor temperature in °C
    """
    h = _hour_of_day(i, s, -4.0)
    return 22.0 + 13.0 * float(np.exp(-((h - 12.0) ** 2) / 20.0))


def sun_component(orientation: Orientation, i: int, s: float) -> float:
    """
    Sun load on an office facade; East peaks at 08:00, South at 12:00,
    West at 16:00. North facades get no sun.
    """
    if orientation is Orientation.EAST:
        return 8.0 * float(np.exp(-((_hour_of_day(i, s, 4.0) - 12.0) ** 2) / 5.0))
    if orientation is Orientation.SOUTH:
        return 15.0 * float(np.exp(-((_hour_of_day(i, s) - 12.0) ** 2) / 5.0))
    if orientation is Orientation.WEST:
        return 8.0 * float(np.exp(-((_hour_of_day(i, s, -4.0) - 12.0) ** 2) / 5.0))
    return 0.0


def sun_components(i: int, s: float) -> Dict[Orientation, float]:
    return {orientation: sun_component(orientation, i, s) for orientation in Orientation}


def deterministic_virtual_temp(params: BuildingParams, i: int) -> np.ndarray:
    """Virtual temperature per office with the fluctuation set to zero"""
    outdoor = outdoor_temp(i, params.step_hours)
    sun = sun_components(i, params.step_hours)
    return np.array([outdoor + sun[f] for f in params.orientations])


# =========================================================================
# STOCHASTIC SAMPLE
# =========================================================================

def sample_weather(params: BuildingParams, i: int, rng: np.random.Generator,
                   fluct: Optional[np.ndarray] = None) -> WeatherSample:
    """
    Weather of interval i

    Draws one standard-normal fluctuation per office from rng (numpy's
    ziggurat standard_normal, fixed for a given numpy build). Passing fluct
    bypasses the draw; the generator is left untouched in that case.
    """
    if fluct is None:
        fluct = rng.standard_normal(params.n_offices)
    else:
        fluct = np.broadcast_to(np.asarray(fluct, dtype=float), (params.n_offices,)).copy()

    outdoor = outdoor_temp(i, params.step_hours)
    sun = sun_components(i, params.step_hours)
    base = np.array([outdoor + sun[f] for f in params.orientations])
    return WeatherSample(
        interval=i,
        outdoor=outdoor,
        sun=sun,
        fluct=fluct,
        virtual_temp=base + fluct,
    )


class WeatherProcessor:
    """
    Weather source bound to one run's weather stream

    The stream is consumed in interval order; running two processors from
    the same seed yields bit-identical sample sequences.
    """

    def __init__(self, params: BuildingParams, rng: np.random.Generator,
                 config: Optional[Dict] = None):
        self.params = params
        self.rng = rng
        self.config = config or self._default_config()

        self.stats = {
            'samples': 0,
            'max_virtual_temp': float('-inf'),
            'min_virtual_temp': float('inf'),
        }

    def _default_config(self) -> Dict:
        return {
            'zero_noise': False,    # test hook: fluctuation forced to 0
        }

    def sample(self, i: int) -> WeatherSample:
        if self.config.get('zero_noise', False):
            weather = sample_weather(self.params, i, self.rng, fluct=np.zeros(self.params.n_offices))
        else:
            weather = sample_weather(self.params, i, self.rng)

        self.stats['samples'] += 1
        self.stats['max_virtual_temp'] = max(self.stats['max_virtual_temp'], float(np.max(weather.virtual_temp)))
        self.stats['min_virtual_temp'] = min(self.stats['min_virtual_temp'], float(np.min(weather.virtual_temp)))
        logger.debug(f"interval {i}: outdoor {weather.outdoor:.3f} °C")
        return weather

    def get_statistics(self) -> Dict:
        return dict(self.stats)

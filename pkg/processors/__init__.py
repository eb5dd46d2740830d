"""Physics processors: weather synthesis and office thermal dynamics"""
from .thermal_processor import ThermalProcessor, pipeline_allocate, step_temperature
from .weather_processor import WeatherProcessor, outdoor_temp, sample_weather, sun_component

__all__ = [
    'ThermalProcessor', 'pipeline_allocate', 'step_temperature',
    'WeatherProcessor', 'outdoor_temp', 'sample_weather', 'sun_component',
]

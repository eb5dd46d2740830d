"""Core domain types, measure and errors"""
from .building_state import BuildingParams, Orientation, PowerAllocation, ResourceInput, WeatherSample
from .measure import StepMeasure, stddev_deviation, window_mean

__all__ = [
    'BuildingParams', 'Orientation', 'PowerAllocation', 'ResourceInput',
    'WeatherSample', 'StepMeasure', 'stddev_deviation', 'window_mean',
]

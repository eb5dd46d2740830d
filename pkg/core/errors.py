"""
Exception hierarchy for the climate allocation simulator.

Every error raised on purpose by the library derives from ClimateSimError so
the command line front end can turn it into a one-line message and an exit
code. Configuration problems also derive from ValueError.
"""

from typing import Optional


class ClimateSimError(Exception):
    """Base class for all simulator errors"""


class ConfigError(ClimateSimError, ValueError):
    """
    Invalid scenario configuration

    Attributes:
        key: Name of the offending configuration key (if known)
    """

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class NoOfficesError(ClimateSimError, ValueError):
    """A measure was requested over zero offices"""

    def __init__(self, message: str = "no offices"):
        super().__init__(message)


class EmptyWindowError(ClimateSimError, ValueError):
    """A window summary was requested over no trace records"""


class DegenerateTemperatureError(ClimateSimError, ValueError):
    """Zero temperature or zero mean setpoint in the relative-temperature quotient"""

    def __init__(self, message: str = "degenerate temperature"):
        super().__init__(message)


class InvalidUtilityError(ClimateSimError, ValueError):
    """Utility constants do not satisfy u1 < u2 < u3"""

    def __init__(self, message: str = "invalid utility constants"):
        super().__init__(message)


class ClearingError(ClimateSimError):
    """Equilibrium price could not be computed"""


class InfeasibleReallocationError(ClearingError):
    """Bounds admit no zero-sum reallocation"""

    def __init__(self, message: str = "no feasible reallocation"):
        super().__init__(message)


class BracketNotFoundError(ClearingError):
    """Price bracket expansion gave up"""

    def __init__(self, message: str = "bracket not found"):
        super().__init__(message)


class ScenarioStepError(ClimateSimError):
    """
    A scheme failed inside a run

    Attributes:
        interval: Interval index (minutes since midnight) of the failing step
    """

    def __init__(self, interval: int, cause: Exception):
        self.interval = interval
        self.cause = cause
        super().__init__(f"interval {interval}: {cause}")


class ComparisonMismatchError(ClimateSimError, ValueError):
    """Scenarios in one comparison do not share building or seed"""

"""
BUILDING MODEL TESTS

Weather synthesis, office dynamics and the cold-air pipeline.
"""

import math

import numpy as np
import pytest

from config.scenario_config import ScenarioConfig, SchemeKind
from core.building_state import BuildingParams, Orientation, ResourceInput
from core.errors import ConfigError
from integration.simulation_engine import run_scenario
from processors.thermal_processor import (
    ThermalProcessor, heat_in, pipeline_allocate, settle_office, steady_consumption, step_temperature,
)
from processors.weather_processor import (
    WeatherProcessor, outdoor_temp, sample_weather, sun_component,
)

S = 1.0 / 60.0


# =========================================================================
# WEATHER
# =========================================================================

def test_outdoor_temperature_profile():
    """Outdoor temperature peaks at 16:00 and bottoms out at 04:00"""
    print("\n" + "=" * 70)
    print("🌡️  TESTING OUTDOOR TEMPERATURE")
    print("=" * 70)

    assert outdoor_temp(960, S) == pytest.approx(35.0, abs=1e-9), "16:00 should be the 35 °C peak"
    assert outdoor_temp(240, S) == pytest.approx(22.0 + 13.0 * math.exp(-7.2), abs=1e-9)
    assert outdoor_temp(240, S) == pytest.approx(22.0097, abs=1e-4)
    assert outdoor_temp(720, S) == pytest.approx(27.841, abs=1e-3)

    # midnight wraps with the non-negative modulus: (0 - 4) mod 24 = 20
    assert outdoor_temp(0, S) == pytest.approx(22.0 + 13.0 * math.exp(-3.2), abs=1e-9)
    assert outdoor_temp(0, S) == pytest.approx(outdoor_temp(1440, S), abs=1e-9), "profile must be 24 h periodic"

    day = [outdoor_temp(i, S) for i in range(1440)]
    assert 22.0 <= min(day) and max(day) <= 35.0 + 1e-9, "outdoor temperature leaves [22, 35]"
    print(f"  ✅ min {min(day):.4f} °C, max {max(day):.4f} °C")


def test_sun_components():
    """East, South and West peak at 8, 12 and 16 h; North has no sun"""
    print("\n" + "=" * 70)
    print("☀️  TESTING SUN COMPONENTS")
    print("=" * 70)

    assert sun_component(Orientation.SOUTH, 720, S) == pytest.approx(15.0)
    assert sun_component(Orientation.EAST, 480, S) == pytest.approx(8.0)
    assert sun_component(Orientation.WEST, 960, S) == pytest.approx(8.0)
    for i in (0, 300, 720, 1000, 1439):
        assert sun_component(Orientation.NORTH, i, S) == 0.0, "North offices get no sun"

    peaks = {o: int(np.argmax([sun_component(o, i, S) for i in range(1440)]))
             for o in (Orientation.EAST, Orientation.SOUTH, Orientation.WEST)}
    assert peaks == {Orientation.EAST: 480, Orientation.SOUTH: 720, Orientation.WEST: 960}
    print(f"  ✅ peaks at minutes {peaks}")


def test_sample_weather_zero_noise_and_identity(default_building):
    """Virtual temperature is outdoor + sun + fluctuation, exactly"""
    rng = np.random.default_rng(1)
    calm = sample_weather(default_building, 720, rng, fluct=np.zeros(100))
    south = 25
    assert default_building.orientations[south] is Orientation.SOUTH
    assert calm.virtual_temp[south] == calm.outdoor + 15.0

    weather = sample_weather(default_building, 812, rng)
    for o, facing in enumerate(default_building.orientations):
        assert weather.virtual_temp[o] == weather.outdoor + weather.sun[facing] + weather.fluct[o]
    print("  ✅ virtual temperature identity holds for every office")


def test_sample_weather_is_deterministic(default_building):
    first = [sample_weather(default_building, i, np.random.default_rng(7)).virtual_temp for i in range(3)]
    second = [sample_weather(default_building, i, np.random.default_rng(7)).virtual_temp for i in range(3)]
    for a, b in zip(first, second):
        assert np.array_equal(a, b), "same seed must give identical weather"


def test_fluctuation_statistics():
    """One million draws: mean within ±0.005, std within 1 ± 0.005"""
    params = BuildingParams(n_offices=1000)
    rng = np.random.default_rng(2024)
    draws = np.concatenate([sample_weather(params, i, rng).fluct for i in range(1000)])
    assert draws.size == 1_000_000
    assert -0.005 <= draws.mean() <= 0.005, f"fluctuation mean {draws.mean():.5f}"
    assert 0.995 <= draws.std() <= 1.005, f"fluctuation std {draws.std():.5f}"
    print(f"  ✅ mean {draws.mean():+.5f}, std {draws.std():.5f}")


def test_weather_processor_zero_noise_hook(small_building):
    processor = WeatherProcessor(small_building, np.random.default_rng(0), {'zero_noise': True})
    weather = processor.sample(600)
    assert np.all(weather.fluct == 0.0)
    assert processor.get_statistics()['samples'] == 1


# =========================================================================
# OFFICE DYNAMICS
# =========================================================================

def test_step_temperature_examples():
    print("\n" + "=" * 70)
    print("🏢 TESTING OFFICE DYNAMICS")
    print("=" * 70)

    assert step_temperature(20.0, 20.0, 0.2, 10.0, 10.0) == pytest.approx(20.18 / 1.01, abs=1e-12)
    assert step_temperature(20.0, 20.0, 0.2, 10.0, 10.0) == pytest.approx(19.9802, abs=1e-4)
    assert step_temperature(0.0, 30.0, 3.0, 10.0, 10.0) == pytest.approx(0.0, abs=1e-15), "zero forcing"
    print("  ✅ hand-evaluated steps match")


def test_steady_consumption_holds_temperature():
    """The fixed-point consumption keeps the office at 20 °C for 100 steps"""
    p_cons = steady_consumption(20.0, 30.0, 10.0)
    assert p_cons == pytest.approx(1.0)
    T = 20.0
    for _ in range(100):
        T = step_temperature(T, 30.0, p_cons, 10.0, 10.0)
    assert T == pytest.approx(20.0, abs=1e-9), f"fixed point drifted to {T}"


def test_settle_office_is_consistent():
    """The settled request reproduces the settled temperature through the physics"""
    for cap in (np.inf, 0.4, 5.0):
        office = settle_office(T_prev=20.3, T_virt=31.0, R=10.0, C=10.0, f_prev=1.0, gain=10.0,
                               setpoint=20.0, offset=0.2, f_min=0.0, f_max=3.0, cap=cap)
        consumed = min(office.request, cap)
        assert consumed == pytest.approx(office.consumed, abs=1e-12)
        T = step_temperature(20.3, 31.0, consumed, 10.0, 10.0)
        assert T == pytest.approx(office.temperature, abs=1e-12)
        expected = min(max(1.0 + 10.0 * (T - 20.0) - 0.2, 0.0), 3.0)
        assert office.request == pytest.approx(expected, abs=1e-12)


# =========================================================================
# PIPELINE
# =========================================================================

def test_pipeline_examples():
    print("\n" + "=" * 70)
    print("🌬️  TESTING PIPELINE ALLOCATION")
    print("=" * 70)

    params = BuildingParams(n_offices=3, resource_input=ResourceInput.limited(140))
    allocation = pipeline_allocate(np.array([3.0, 0.0, 0.0]), params)
    assert allocation.consumed[0] == 3.0
    assert allocation.available[1] == 137.0

    idle = pipeline_allocate(np.zeros(3), params)
    assert np.all(idle.consumed == 0.0) and np.all(idle.available == 140.0)

    tight = BuildingParams(n_offices=3, resource_input=ResourceInput.limited(4))
    allocation = pipeline_allocate(np.array([3.0, 3.0, 3.0]), tight)
    assert np.allclose(allocation.consumed, [2.0, 1.0, 0.5])
    assert np.allclose(allocation.available, [4.0, 2.0, 1.0])
    assert allocation.outflow == pytest.approx(0.5)
    print("  ✅ hand walks of the pipe match")


def test_pipeline_invariants(default_building):
    """Conservation, the eta bound and the available-power chain"""
    rng = np.random.default_rng(3)
    for _ in range(50):
        requests = rng.uniform(0.0, 3.0, 100)
        allocation = pipeline_allocate(requests, default_building)
        order = list(default_building.pipe_order)

        assert abs(140.0 - allocation.total_consumed - allocation.outflow) <= 1e-12
        assert np.all(allocation.consumed >= 0.0)
        assert np.all(allocation.consumed <= 0.5 * allocation.available + 1e-15)
        for k in range(len(order) - 1):
            here, nxt = order[k], order[k + 1]
            assert allocation.available[nxt] == pytest.approx(
                allocation.available[here] - allocation.consumed[here], abs=1e-12)
        assert allocation.total_consumed <= 140.0 + 1e-12


def test_pipeline_unlimited_and_order():
    unlimited = BuildingParams(n_offices=4, resource_input=ResourceInput.unlimited())
    requests = np.array([3.0, 2.5, 0.1, 3.0])
    assert np.array_equal(pipeline_allocate(requests, unlimited).consumed, requests)

    reversed_pipe = BuildingParams(n_offices=3, resource_input=ResourceInput.limited(4),
                                   pipe_order=(2, 1, 0))
    allocation = pipeline_allocate(np.array([3.0, 3.0, 3.0]), reversed_pipe)
    assert np.allclose(allocation.consumed, [0.5, 1.0, 2.0]), "office 2 sits at the pipe head"


def test_thermal_processor_fills_heat_in(small_building):
    thermal = ThermalProcessor(small_building)
    temps = np.full(8, 21.0)
    virtual = np.full(8, 30.0)
    new_temps, allocation = thermal.advance(temps, virtual, np.full(8, 1.0))
    assert np.allclose(allocation.heat_in, (virtual - new_temps) / 10.0)
    assert thermal.get_statistics()['intervals'] == 1

    assert heat_in(30.0, 20.0, 10.0) == pytest.approx(1.0)
    assert heat_in(18.0, 20.0, 4.0) == pytest.approx(-0.5), "a cooler outside draws heat out"


# =========================================================================
# PARAMETERS
# =========================================================================

def test_building_defaults_and_validation(default_building):
    split = default_building.orientation_split()
    assert all(count == 25 for count in split.values()), f"uneven split {split}"
    assert default_building.orientations[0] is Orientation.EAST
    assert default_building.orientations[49] is Orientation.SOUTH
    assert default_building.orientations[50] is Orientation.WEST
    assert default_building.orientations[99] is Orientation.NORTH
    assert default_building.pipe_order == tuple(range(100))

    with pytest.raises(ConfigError):
        BuildingParams(n_offices=0)
    with pytest.raises(ConfigError):
        BuildingParams(eta=0.0)
    with pytest.raises(ConfigError):
        BuildingParams(f_min=4.0)
    with pytest.raises(ConfigError):
        BuildingParams(n_offices=3, pipe_order=(0, 0, 1))
    with pytest.raises(ConfigError):
        BuildingParams(n_offices=2, thermal_resistance=(10.0, -1.0))


# =========================================================================
# UNCONTROLLED BEHAVIOUR
# =========================================================================

def test_larger_rc_fluctuates_less():
    """Identical weather, zero control: R = C = 10 moves slower than R = C = 3"""
    def max_step(rc):
        building = BuildingParams(thermal_resistance=rc, thermal_capacitance=rc)
        config = ScenarioConfig(scheme=SchemeKind.UNCONTROLLED, building=building, start_minute=0,
                                duration_minutes=1440, initial_control=0.0, seed=5)
        temps = run_scenario(config).temperature_matrix()
        return float(np.max(np.abs(np.diff(temps, axis=0))))

    slow, fast = max_step(10.0), max_step(3.0)
    print(f"  R=C=10: {slow:.4f} °C/min, R=C=3: {fast:.4f} °C/min")
    assert slow < fast, "higher R*C should give smaller fluctuations"


def test_uncontrolled_offices_overheat():
    """Without cooling every office is above 25 °C between noon and 16:00"""
    config = ScenarioConfig(scheme=SchemeKind.UNCONTROLLED, start_minute=0, duration_minutes=960,
                            initial_control=0.0, seed=0)
    trace = run_scenario(config)
    window = np.array([r.temperatures for r in trace.records if 720 <= r.interval < 960])
    print(f"  minimum office temperature 12:00-16:00: {window.min():.3f} °C")
    assert window.min() > 25.0

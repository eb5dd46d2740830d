"""
Seeded random streams of one simulation run

Two independent numpy Generators (PCG64) are split off the scenario seed:

    weather: SeedSequence([seed, 0])
    scheme:  SeedSequence([seed, 1, scheme_code])

The weather stream ignores the scheme, so every scheme of a comparison sees
the same weather draws; scheme-internal randomness (auction rationing) uses
its own stream and cannot disturb the weather.
"""

import numpy as np

WEATHER_STREAM = 0
SCHEME_STREAM = 1


def weather_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, WEATHER_STREAM])))


def scheme_generator(seed: int, scheme_code: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, SCHEME_STREAM, scheme_code])))


class RunStreams:
    """Both generators of one run; a fresh instance replays the same draws"""

    def __init__(self, seed: int, scheme_code: int):
        self.seed = seed
        self.scheme_code = scheme_code
        self.weather = weather_generator(seed)
        self.scheme = scheme_generator(seed, scheme_code)

    def __repr__(self) -> str:
        return f"RunStreams(seed={self.seed}, scheme_code={self.scheme_code})"

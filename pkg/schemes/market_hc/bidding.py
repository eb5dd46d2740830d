"""
HC BIDDING - Office agents of the double-auction market

Each office agent compares its temperature to the building average:
relative temperature t > 1 (cooler than average relative to its setpoint)
makes it a seller of cooling power, t < 1 a buyer. Volumes split a fixed
market size alpha in proportion to |1 - t|, and the bid price is the
agent's marginal utility, which grows with how hot the office is.

Variants switch single ingredients off:
- NO_MONEY: the money-dependent utility scale is a constant
- NO_TEMPERATURE: fixed bid prices for all sellers and all buyers
- NO_AUCTION: every agent simply applies its own volume, reading the
  temperature of the interval it decides
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List

import numpy as np

from core.errors import ConfigError, DegenerateTemperatureError, InvalidUtilityError
from schemes.base import StateSnapshot

logger = logging.getLogger(__name__)


class HcVariant(Enum):
    ORIGINAL = "original"
    NO_MONEY = "no-money"
    NO_TEMPERATURE = "no-temperature"
    NO_AUCTION = "no-auction"


# Market strength that gave the lowest 15:00-19:00 spread for each variant
DEFAULT_ALPHA = {
    HcVariant.ORIGINAL: 64.0,
    HcVariant.NO_MONEY: 66.0,
    HcVariant.NO_TEMPERATURE: 65.0,
    HcVariant.NO_AUCTION: 17.0,
}


@dataclass(frozen=True)
class Bid:
    """
    One auction message [sell, volume, price]

    Attributes:
        office: Office index of the bidder
        sell: True for an offer to sell cooling power
        volume: Offered or requested volume v >= 0
        price: Limit price B > 0
    """
    office: int
    sell: bool
    volume: float
    price: float

    def __post_init__(self):
        if self.volume < 0:
            raise ValueError(f"bid volume must be non-negative, got {self.volume}")
        if not (np.isfinite(self.price) and self.price > 0):
            raise ValueError(f"bid price must be finite and positive, got {self.price}")


@dataclass(frozen=True)
class HcParams:
    """
    Attributes:
        alpha: Total traded volume per auction
        u1, u2, u3: Utility constants, u1 < u2 < u3
        f_max: Upper control bound, also the money scale
        f_min: Lower control bound
        variant: Which ingredients are active
        flat_utility: Utility scale used by the NO_MONEY variant
        sell_price: Seller price of the NO_TEMPERATURE variant
        buy_price: Buyer price of the NO_TEMPERATURE variant
    """
    alpha: float = 64.0
    u1: float = 20.0
    u2: float = 200.0
    u3: float = 2000.0
    f_max: float = 3.0
    f_min: float = 0.0
    variant: HcVariant = HcVariant.ORIGINAL
    flat_utility: float = 2000.0
    sell_price: float = 10.0
    buy_price: float = 100.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ConfigError("must be positive", key="alpha")
        if not self.u1 < self.u2 < self.u3:
            raise InvalidUtilityError()


# =========================================================================
# AGENT QUANTITIES
# =========================================================================

def compute_t(temp, setpoint, mean_temp, mean_setpoint):
    """
    Relative temperature t = (setpoint/temp) * (mean_temp/mean_setpoint)

    t > 1 classifies a seller, t < 1 a buyer. Temperatures are in °C.

    Raises:
        DegenerateTemperatureError: temp or mean_setpoint is zero
    """
    if np.any(np.asarray(temp) == 0) or mean_setpoint == 0:
        raise DegenerateTemperatureError()
    return (setpoint / temp) * (mean_temp / mean_setpoint)


def trade_volumes(t_values, alpha: float) -> np.ndarray:
    """
    v_o = alpha * |1 - t_o| / sum |1 - t|

    Returns all zeros when every t equals 1.
    """
    spread = np.abs(1.0 - np.asarray(t_values, dtype=float))
    total = float(np.sum(spread))
    if total == 0.0:
        return np.zeros_like(spread)
    return alpha * spread / total


def money(f, f_max: float):
    """Money derived from the valve position, 100 at f = 0 up to 200 at f = f_max"""
    return 100.0 * (2.0 - (f_max - f) / f_max)


def u_zero(m, params: HcParams):
    """
    Utility scale U(0, m) = u3 - (u3 - u1) * exp(-gamma * m),
    gamma = ln((u3 - u1) / (u3 - u2))

    NO_MONEY returns the flat scale regardless of m.
    """
    if params.u3 <= params.u2:
        raise InvalidUtilityError()
    if params.variant is HcVariant.NO_MONEY:
        if np.ndim(m):
            return np.full(np.shape(m), params.flat_utility)
        return params.flat_utility
    gamma = np.log((params.u3 - params.u1) / (params.u3 - params.u2))
    return params.u3 - (params.u3 - params.u1) * np.exp(-gamma * np.asarray(m, dtype=float))


def marginal_utility(t, setpoint, m, params: HcParams):
    """U = U(0, m) ** (1 - t / setpoint); the previous-price multiplier is omitted"""
    return u_zero(m, params) ** (1.0 - t / setpoint)


# =========================================================================
# BIDS
# =========================================================================

def relative_temperatures(snapshot: StateSnapshot) -> np.ndarray:
    return compute_t(snapshot.temperatures, snapshot.setpoints,
                     snapshot.mean_temp, snapshot.mean_setpoint)


def make_bids(snapshot: StateSnapshot, params: HcParams) -> List[Bid]:
    """
    One bid per office whose relative temperature differs from 1

    Prices follow the variant: marginal utility (ORIGINAL, NO_MONEY) or the
    fixed seller/buyer prices (NO_TEMPERATURE).
    """
    t = relative_temperatures(snapshot)
    volumes = trade_volumes(t, params.alpha)

    if params.variant is HcVariant.NO_TEMPERATURE:
        prices = np.where(t > 1.0, params.sell_price, params.buy_price)
    else:
        m = money(snapshot.controls, params.f_max)
        prices = marginal_utility(t, snapshot.setpoints, m, params)

    bids = []
    for o in range(snapshot.n_offices):
        if t[o] == 1.0 or volumes[o] == 0.0:
            continue
        bids.append(Bid(office=o, sell=bool(t[o] > 1.0), volume=float(volumes[o]),
                        price=float(prices[o])))
    logger.debug(f"interval {snapshot.interval}: {len(bids)} bids")
    return bids


def no_auction_update(f_prev, t, alpha: float, f_min: float, f_max: float) -> np.ndarray:
    """Buyers add their volume, sellers subtract it, then clamp"""
    t = np.asarray(t, dtype=float)
    volumes = trade_volumes(t, alpha)
    direction = np.sign(1.0 - t)
    return np.clip(np.asarray(f_prev, dtype=float) + direction * volumes, f_min, f_max)


def no_auction_gains(open_loop, setpoints, alpha: float) -> np.ndarray:
    """
    Per-office gain of the no-auction rule read at the interval's own temperature

    The volumes are split by |1 - t| at the open-loop temperatures T0 (every
    control held at its previous value). Around T0,

        1 - t_o = (T_o * <setp> - setp_o * <T>) / (T_o * <setp>)

    is taken with T0_o in the denominator, so the update becomes
    gain_o * (T_o - setp_o * <T> / <setp>) with gain_o = alpha / (S0 * T0_o),
    S0 = sum |1 - t(T0)|. At T = T0 this equals no_auction_update exactly.

    Returns zeros when every open-loop t equals 1.
    """
    open_loop = np.asarray(open_loop, dtype=float)
    setpoints = np.asarray(setpoints, dtype=float)
    t0 = compute_t(open_loop, setpoints, float(np.mean(open_loop)), float(np.mean(setpoints)))
    spread = float(np.sum(np.abs(1.0 - t0)))
    if spread == 0.0:
        return np.zeros_like(open_loop)
    return alpha / (spread * open_loop)

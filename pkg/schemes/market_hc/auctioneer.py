"""
HC AUCTIONEER - Single-price clearing of the cooling-power double auction

The clearing price is the bid price at which accepted supply and accepted
demand match as closely as possible. Sellers asking at most the price sell,
buyers offering at least the price buy. Whatever imbalance remains is
rationed on the long side: valid candidates are visited in a random order
and filled until the short side's volume is met, the crossing agent
delivering a fraction of its bid.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from core.building_state import BuildingParams
from schemes.base import AllocationScheme, FeedbackLaw, SchemeDecision, StateSnapshot
from schemes.market_hc.bidding import (
    DEFAULT_ALPHA, Bid, HcParams, HcVariant, make_bids, no_auction_gains, no_auction_update,
    relative_temperatures,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Fill:
    """
    Cleared outcome of one bid

    Attributes:
        office: Office index
        signed_volume: +volume bought, -volume sold
        clearing_price: Price the auction cleared at
    """
    office: int
    signed_volume: float
    clearing_price: float


@dataclass
class AuctionResult:
    """
    Attributes:
        price: Clearing price, None when nothing traded
        fills: One fill per accepted bid
        supply: Accepted sell volume before rationing
        demand: Accepted buy volume before rationing
        rationed: True when the long side was cut back
    """
    price: Optional[float]
    fills: List[Fill] = field(default_factory=list)
    supply: float = 0.0
    demand: float = 0.0
    rationed: bool = False

    @property
    def cleared_volume(self) -> float:
        return float(sum(f.signed_volume for f in self.fills if f.signed_volume > 0))


def _accepted(bids: Sequence[Bid], price: float):
    sellers = [b for b in bids if b.sell and b.price <= price]
    buyers = [b for b in bids if not b.sell and b.price >= price]
    return sellers, buyers


def _ration(candidates: List[Bid], target: float, rng: np.random.Generator) -> Dict[int, float]:
    """Fill candidates in random order until target volume is reached"""
    filled = {}
    remaining = target
    for k in rng.permutation(len(candidates)):
        bid = candidates[int(k)]
        take = min(bid.volume, remaining)
        filled[bid.office] = take
        remaining -= take
    return filled


def clear_auction(bids: Sequence[Bid], rng: np.random.Generator) -> AuctionResult:
    """
    Clear one auction round

    The candidate prices are the distinct bid prices; the one minimizing
    |accepted supply - accepted demand| wins, ties going to the lowest
    price. With no bids, or no volume possible on one side, nothing trades.

    Returns:
        AuctionResult with fills balancing exactly
    """
    if not bids:
        return AuctionResult(price=None)

    best_price, best_gap = None, float('inf')
    for price in sorted({b.price for b in bids}):
        sellers, buyers = _accepted(bids, price)
        gap = abs(sum(b.volume for b in sellers) - sum(b.volume for b in buyers))
        if gap < best_gap:
            best_price, best_gap = price, gap

    sellers, buyers = _accepted(bids, best_price)
    supply = float(sum(b.volume for b in sellers))
    demand = float(sum(b.volume for b in buyers))
    if supply == 0.0 or demand == 0.0:
        logger.debug("one-sided auction, no trade")
        return AuctionResult(price=None, supply=supply, demand=demand)

    rationed = supply != demand
    sell_volume = {b.office: b.volume for b in sellers}
    buy_volume = {b.office: b.volume for b in buyers}
    if supply > demand:
        sell_volume = _ration(sellers, demand, rng)
    elif demand > supply:
        buy_volume = _ration(buyers, supply, rng)

    fills = [Fill(office=b.office, signed_volume=-sell_volume[b.office], clearing_price=best_price)
             for b in sellers]
    fills += [Fill(office=b.office, signed_volume=buy_volume[b.office], clearing_price=best_price)
              for b in buyers]
    return AuctionResult(price=best_price, fills=fills, supply=supply, demand=demand, rationed=rationed)


def interior_price(result: AuctionResult, low: float, high: float) -> AuctionResult:
    """
    Report the midpoint of (low, high) as the clearing price

    With only two price levels every price strictly between them accepts the
    same bids, so the tie-break's boundary is replaced by the midpoint. Fills
    are unchanged apart from their price; a round without trade stays so.
    """
    if result.price is None:
        return result
    price = 0.5 * (low + high)
    fills = [replace(fill, clearing_price=price) for fill in result.fills]
    return replace(result, price=price, fills=fills)


def apply_fills(f_prev, fills: Sequence[Fill], f_min: float, f_max: float) -> np.ndarray:
    """Add bought volume, subtract sold volume, clamp"""
    controls = np.array(f_prev, dtype=float)
    for fill in fills:
        controls[fill.office] += fill.signed_volume
    return np.clip(controls, f_min, f_max)


# =========================================================================
# SCHEME
# =========================================================================

class MarketHcScheme(AllocationScheme):
    """
    Double-auction market and its ablations

    One auction per interval, based on the temperatures of the previous
    interval. The no-auction variant reads the temperature of the interval
    it decides when the engine solves it together with the physics, and
    falls back to the previous interval otherwise.
    """

    reports_price = True

    def __init__(self, params: BuildingParams, rng: Optional[np.random.Generator] = None,
                 config: Optional[Dict] = None):
        super().__init__(params, rng, config)
        variant = HcVariant(self.config['variant'])
        alpha = self.config.get('alpha') or DEFAULT_ALPHA[variant]
        u1, u2, u3 = self.config['utility']
        self.hc = HcParams(alpha=alpha, u1=u1, u2=u2, u3=u3, f_max=params.f_max,
                           f_min=params.f_min, variant=variant)
        self.name = "market-a" if variant is HcVariant.ORIGINAL else f"market-a-{variant.value}"
        self.reports_price = variant is not HcVariant.NO_AUCTION
        self.needs_open_loop = variant is HcVariant.NO_AUCTION
        if self.rng is None:
            self.rng = np.random.default_rng(0)

        self.stats.update({
            'auctions': 0,
            'empty_auctions': 0,
            'rationed_auctions': 0,
            'cleared_volume': 0.0,
            'same_interval_decisions': 0,
        })

    def _default_config(self) -> Dict:
        return {
            'variant': HcVariant.ORIGINAL.value,
            'alpha': None,
            'utility': (20.0, 200.0, 2000.0),
        }

    def decide(self, snapshot: StateSnapshot) -> SchemeDecision:
        self.stats['decisions'] += 1
        hc = self.hc

        if hc.variant is HcVariant.NO_AUCTION:
            t = relative_temperatures(snapshot)
            controls = no_auction_update(snapshot.controls, t, hc.alpha, hc.f_min, hc.f_max)
            return SchemeDecision(controls=controls)

        bids = make_bids(snapshot, hc)
        result = clear_auction(bids, self.rng)
        if hc.variant is HcVariant.NO_TEMPERATURE:
            result = interior_price(result, hc.sell_price, hc.buy_price)

        self.stats['auctions'] += 1
        if result.price is None:
            self.stats['empty_auctions'] += 1
        if result.rationed:
            self.stats['rationed_auctions'] += 1
        self.stats['cleared_volume'] += result.cleared_volume

        controls = apply_fills(snapshot.controls, result.fills, hc.f_min, hc.f_max)
        return SchemeDecision(
            controls=controls,
            price=result.price,
            details={'bids': len(bids), 'rationed': result.rationed},
        )

    def feedback_law(self, snapshot: StateSnapshot,
                     open_loop: Optional[np.ndarray] = None) -> Optional[FeedbackLaw]:
        """
        Same-interval form of the no-auction rule

        F_o = clamp(F_prev_o + gain_o * (T_o - setp_o * <T> / <setp>)), written as
        gain_o * (T_o - setp_o) - weight_o * (<T> - <setp>) with
        weight_o = gain_o * setp_o / <setp>. The auction variants have none.
        """
        if self.hc.variant is not HcVariant.NO_AUCTION or open_loop is None:
            return None
        setpoints = snapshot.setpoints
        mean_setpoint = snapshot.mean_setpoint
        gain = no_auction_gains(open_loop, setpoints, self.hc.alpha)
        return FeedbackLaw(
            gain=gain,
            weights=gain * setpoints / mean_setpoint,
            global_term=lambda temps: float(np.mean(temps) - mean_setpoint),
        )

    def decide_settled(self, snapshot: StateSnapshot, settled) -> SchemeDecision:
        if self.hc.variant is not HcVariant.NO_AUCTION:
            return super().decide_settled(snapshot, settled)
        self.stats['decisions'] += 1
        self.stats['same_interval_decisions'] += 1
        return SchemeDecision(controls=np.array(settled.requests, dtype=float))

"""
EQUILIBRIUM MARKET - Competitive market with quadratic quasi-linear agents

Every office agent values a change dF of its control signal by

    u(dF, m) = -alpha_o^2 * (dF - phi_o)^2 + m,    phi_o = beta * (T_o - T_o^setp)

so at price p it demands dF = phi_o - p / (2 alpha_o^2), clamped to the
range its actuator still allows. The auctioneer picks the price at which
net demand sums to zero: power is only moved between offices.

Without bounds the price has a closed form; with bounds aggregate demand is
a continuous, piecewise-linear, non-increasing function of p and the price
is found by bisection followed by an exact solve on the final active set.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from core.building_state import BuildingParams
from core.errors import BracketNotFoundError, ConfigError, InfeasibleReallocationError
from schemes.base import AllocationScheme, FeedbackLaw, SchemeDecision, StateSnapshot

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-9
MAX_BRACKET_DOUBLINGS = 64


@dataclass(frozen=True)
class NetDemandFn:
    """
    Clamped linear net demand of one agent

    Attributes:
        phi: Desired change of the control signal at zero price
        alpha_sq: Strength parameter squared
        lower: Smallest allowed change (f_min - f_prev)
        upper: Largest allowed change (f_max - f_prev)
    """
    phi: float
    alpha_sq: float
    lower: float = -np.inf
    upper: float = np.inf

    def __post_init__(self):
        if not self.alpha_sq > 0:
            raise ValueError(f"alpha_sq must be positive, got {self.alpha_sq}")
        if self.lower > self.upper:
            raise ValueError(f"empty demand range [{self.lower}, {self.upper}]")

    @property
    def price_weight(self) -> float:
        """Slope magnitude 1 / (2 alpha^2) of the unclamped demand"""
        return 1.0 / (2.0 * self.alpha_sq)


@dataclass
class ClearingResult:
    """
    Attributes:
        price: Equilibrium price
        deltas: Cleared change per agent
        residual: |sum of deltas|
        iterations: Bisection steps (0 for the closed form)
    """
    price: float
    deltas: np.ndarray
    residual: float
    iterations: int = 0


def demand_at(fn: NetDemandFn, p: float) -> float:
    """Utility-maximizing change at price p, clamped to the agent's range"""
    return float(min(max(fn.phi - p * fn.price_weight, fn.lower), fn.upper))


def aggregate_demand(fns: Sequence[NetDemandFn], p: float) -> float:
    return float(sum(demand_at(fn, p) for fn in fns))


def utility(fn: NetDemandFn, delta: float) -> float:
    """Allocation part of the agent's utility (money excluded)"""
    return -fn.alpha_sq * (delta - fn.phi) ** 2


def clear_unbounded(fns: Sequence[NetDemandFn]) -> ClearingResult:
    """
    Closed-form clearing ignoring bounds

    p = sum(phi) / sum(1/(2 alpha^2)), dF_o = phi_o - p/(2 alpha_o^2)
    """
    phi = np.array([fn.phi for fn in fns])
    weights = np.array([fn.price_weight for fn in fns])
    price = float(np.sum(phi) / np.sum(weights))
    deltas = phi - price * weights
    return ClearingResult(price=price, deltas=deltas, residual=abs(float(np.sum(deltas))))


def _as_arrays(fns: Sequence[NetDemandFn]):
    phi = np.array([fn.phi for fn in fns])
    weights = np.array([fn.price_weight for fn in fns])
    lower = np.array([fn.lower for fn in fns])
    upper = np.array([fn.upper for fn in fns])
    return phi, weights, lower, upper


def _find_bracket(excess, center: float, half_width: float, max_doublings: int):
    for _ in range(max_doublings + 1):
        lo, hi = center - half_width, center + half_width
        if excess(lo) >= 0.0 >= excess(hi):
            return lo, hi
        half_width *= 2.0
    raise BracketNotFoundError()


def _polish(phi, weights, lower, upper, price: float) -> float:
    """Exact price on the active set found by bisection (unchanged if the set moves)"""
    raw = phi - price * weights
    interior = (lower < raw) & (raw < upper)
    if not np.any(interior):
        return price
    clamped = np.clip(raw, lower, upper)
    exact = (np.sum(phi[interior]) + np.sum(clamped[~interior])) / np.sum(weights[interior])
    moved = phi - exact * weights
    same_set = np.array_equal((lower < moved) & (moved < upper), interior)
    same_clamps = np.array_equal(np.clip(moved, lower, upper)[~interior], clamped[~interior])
    return float(exact) if same_set and same_clamps else price


def clear_bounded(fns: Sequence[NetDemandFn], eps: float = DEFAULT_EPS,
                  max_doublings: int = MAX_BRACKET_DOUBLINGS) -> ClearingResult:
    """
    Equilibrium price respecting every agent's bounds

    The initial bracket is centred on the unbounded price and wide enough
    to saturate every finite bound; it is doubled up to max_doublings times.

    Raises:
        InfeasibleReallocationError: bounds admit no zero-sum reallocation
        BracketNotFoundError: no sign change found after max_doublings
    """
    if eps <= 0:
        raise ConfigError("must be positive", key="eps")
    phi, weights, lower, upper = _as_arrays(fns)
    if np.sum(lower) > 0.0 or np.sum(upper) < 0.0:
        raise InfeasibleReallocationError()

    def excess(p: float) -> float:
        return float(np.sum(np.clip(phi - p * weights, lower, upper)))

    center = float(np.sum(phi) / np.sum(weights))
    # price at which each agent hits each of its finite bounds
    bounds = np.concatenate([lower, upper])
    finite = np.isfinite(bounds)
    spread = 0.0
    if np.any(finite):
        saturating = (np.tile(phi, 2) - bounds)[finite] / np.tile(weights, 2)[finite]
        spread = float(np.max(np.abs(saturating - center)))
    lo, hi = _find_bracket(excess, center, spread + 1.0, max_doublings)

    iterations = 0
    if abs(excess(lo)) <= eps and abs(excess(hi)) <= eps:
        # every agent saturated across the bracket, allocation is price-invariant
        price = 0.5 * (lo + hi)
    else:
        xtol = 1e-15 * max(1.0, hi - lo)
        price, info = bisect(excess, lo, hi, xtol=xtol, maxiter=500, full_output=True, disp=False)
        iterations = int(info.iterations)
        price = _polish(phi, weights, lower, upper, float(price))

    deltas = np.clip(phi - price * weights, lower, upper)
    residual = abs(float(np.sum(deltas)))
    if residual > eps:
        logger.warning(f"clearing residual {residual:.3e} exceeds tolerance {eps:.1e}")
    return ClearingResult(price=float(price), deltas=deltas, residual=residual, iterations=iterations)


def alpha_from_physics(R, C):
    """|dT/dP| of one interval: (1/C) / (1 + 1/(R*C)); sign dropped, only alpha^2 matters"""
    return (1.0 / C) / (1.0 + 1.0 / (R * C))


# =========================================================================
# SCHEME STEP
# =========================================================================

@dataclass
class MarketBStep:
    """New controls plus the clearing that produced them"""
    controls: np.ndarray
    clearing: ClearingResult
    transfers: np.ndarray


def build_demands(snapshot: StateSnapshot, beta: float, alphas: np.ndarray,
                  params: BuildingParams):
    phi = beta * snapshot.deviations
    lower = params.f_min - snapshot.controls
    upper = params.f_max - snapshot.controls
    return [NetDemandFn(phi=float(phi[o]), alpha_sq=float(alphas[o] ** 2),
                        lower=float(lower[o]), upper=float(upper[o]))
            for o in range(snapshot.n_offices)]


def money_ledger(price: float, deltas: np.ndarray) -> np.ndarray:
    """Money each agent pays (negative: receives) for its cleared change"""
    return price * np.asarray(deltas, dtype=float)


def market_b_step(snapshot: StateSnapshot, beta: float, use_bounds: bool,
                  params: BuildingParams, eps: float = DEFAULT_EPS) -> MarketBStep:
    """
    One market round: demands from the snapshot, clearing, new controls

    In unbounded mode the cleared controls are clamped afterwards; bounded
    mode stays inside the actuator range by construction.
    """
    alphas = alpha_from_physics(params.resistance_vector(), params.capacitance_vector())
    fns = build_demands(snapshot, beta, alphas, params)
    if use_bounds:
        clearing = clear_bounded(fns, eps)
        controls = snapshot.controls + clearing.deltas
    else:
        clearing = clear_unbounded(fns)
        controls = np.clip(snapshot.controls + clearing.deltas, params.f_min, params.f_max)
    return MarketBStep(controls=controls, clearing=clearing,
                       transfers=money_ledger(clearing.price, clearing.deltas))


class MarketBScheme(AllocationScheme):
    """General-equilibrium market, unbounded or bounded clearing"""

    reports_price = True

    def __init__(self, params: BuildingParams, rng: Optional[np.random.Generator] = None,
                 config: Optional[Dict] = None):
        super().__init__(params, rng, config)
        self.beta = float(self.config['beta'])
        if self.beta <= 0:
            raise ConfigError("must be positive", key="beta")
        self.bounded = bool(self.config['bounded'])
        self.conserves_total = self.bounded
        self.eps = float(self.config['eps'])
        self.name = "market-b-bounded" if self.bounded else "market-b-unbounded"
        self.alphas = alpha_from_physics(params.resistance_vector(), params.capacitance_vector())

        self.stats.update({
            'clearings': 0,
            'bisection_iterations': 0,
            'max_residual': 0.0,
            'max_abs_transfer_sum': 0.0,
        })

    def _default_config(self) -> Dict:
        return {'beta': 10.0, 'bounded': False, 'eps': DEFAULT_EPS}

    def decide(self, snapshot: StateSnapshot) -> SchemeDecision:
        step = market_b_step(snapshot, self.beta, self.bounded, self.params, self.eps)
        self.stats['decisions'] += 1
        self.stats['clearings'] += 1
        self.stats['bisection_iterations'] += step.clearing.iterations
        self.stats['max_residual'] = max(self.stats['max_residual'], step.clearing.residual)
        self.stats['max_abs_transfer_sum'] = max(self.stats['max_abs_transfer_sum'],
                                                 abs(float(np.sum(step.transfers))))
        return SchemeDecision(controls=step.controls, price=step.clearing.price,
                              transfers=step.transfers)

    def feedback_law(self, snapshot: StateSnapshot,
                     open_loop: Optional[np.ndarray] = None) -> FeedbackLaw:
        n = snapshot.n_offices
        alpha_sq = self.alphas ** 2
        gain = np.full(n, self.beta)
        if self.bounded:
            return FeedbackLaw(gain=gain, weights=1.0 / (2.0 * alpha_sq), zero_sum=True)

        beta = self.beta
        setpoints = snapshot.setpoints
        return FeedbackLaw(
            gain=gain,
            weights=1.0 / (alpha_sq * np.mean(1.0 / alpha_sq)),
            global_term=lambda temps: beta * float(np.mean(temps - setpoints)),
        )

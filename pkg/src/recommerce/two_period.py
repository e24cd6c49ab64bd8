"""Two-period market for a durable good with a resale stage.

A seller chooses durability ``D`` and prices once-and-for-all. High-valuation
customers buy new in period 1, resell in period 2, and buy new again;
low-valuation customers buy the resold units. Two regimes differ only in who
collects the commission ``beta`` on used sales: an outside marketplace
(third-party) or the seller itself (branded).

The durability first-order condition equates marginal production cost with a
margin-weighted marginal resale quality::

    c'(D*) = delta/(1+delta) * M * s'(D*)

with ``M = 2*alpha*(1-beta)*v_L - v_H`` (third-party) or
``M = alpha*(2-beta)*v_L - v_H`` (branded). The condition uses the derivative
``s'(D)``; a transcription that places ``s(D)`` itself on the right-hand side
does not stationarize the profit objective and is deliberately not
implemented. The social benchmark replaces ``M`` with ``v_L``.

When the relevant margin is not strictly positive the seller shuts the

low types out: zero durability, both prices at ``v_H``, and profit
``(1+delta)*n_H*v_H``. A margin of exactly zero is classified as shutdown
and flagged as a tie.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .primitives import (
    DEFAULT_D_MAX,
    ModelParams,
    Regime,
    bisect_increasing,
)

__all__ = [
    "MarketMode",
    "Prices",
    "ProfitBreakdown",
    "TwoPeriodEquilibrium",
    "activity_margin",
    "activity_threshold",
    "market_mode",
    "social_optimal_durability",
    "optimal_durability",
    "prices",
    "profit_total",
    "profit",
    "welfare",
    "shutdown_profit",
    "constraint_slacks",
    "CONSTRAINT_NAMES",
    "BINDING_CONSTRAINTS",
    "solve",
]


class MarketMode(str, Enum):
    ACTIVE = "active-pre-owned"
    SHUTDOWN = "shutdown"


def activity_margin(params: ModelParams, regime: Regime) -> float:
    """Signed activity margin; the pre-owned market operates iff positive."""

    p = params
    if regime is Regime.THIRD_PARTY:
        return 2.0 * p.alpha * (1.0 - p.beta) * p.v_L - p.v_H
    return p.alpha * (2.0 - p.beta) * p.v_L - p.v_H


def activity_threshold(params: ModelParams, regime: Regime) -> float:
    """The v_L cutoff at which the margin turns positive."""

    p = params
    if regime is Regime.THIRD_PARTY:
        return p.v_H / (2.0 * p.alpha * (1.0 - p.beta))
    return p.v_H / (p.alpha * (2.0 - p.beta))


def market_mode(params: ModelParams, regime: Regime) -> MarketMode:
    """Classify the regime; an exactly zero margin counts as shutdown."""

    return (
        MarketMode.ACTIVE
        if activity_margin(params, regime) > 0.0
        else MarketMode.SHUTDOWN
    )


def _foc_root(params: ModelParams, margin: float, d_max: float, xtol: float) -> float:
    k = params.delta / (1.0 + params.delta)

    def g(D: float) -> float:
        return params.cost.deriv(D) - k * margin * params.quality.deriv(D)

    return bisect_increasing(g, 1e-12, d_max, xtol=xtol)


def social_optimal_durability(
    params: ModelParams, d_max: float = DEFAULT_D_MAX, xtol: float = 1e-10
) -> float:
    """Durability maximizing total surplus: c'(D) = delta/(1+delta)*v_L*s'(D)."""

    return _foc_root(params, params.v_L, d_max, xtol)


def optimal_durability(
    params: ModelParams,
    regime: Regime,
    d_max: float = DEFAULT_D_MAX,
    xtol: float = 1e-10,
) -> float:
    """Profit-maximizing durability in the active region.

    Raises ValueError outside the active region; callers classify first via
    :func:`market_mode`.
    """

    margin = activity_margin(params, regime)
    if margin <= 0.0:
        raise ValueError(
            f"{regime.value}: margin {margin} is not positive; market is shut down"
        )
    return _foc_root(params, margin, d_max, xtol)


@dataclass(frozen=True)
class Prices:
    """Regime-invariant equilibrium prices at durability D."""

    p1n: float
    p2n: float
    p2u: float


def prices(params: ModelParams, D) -> Prices:
    """New-good prices for both periods and the used-good price.

    The used price extracts the deflated low-type valuation; the second-period
    new price makes the high type indifferent between replacing and keeping;
    the first-period price adds the anticipated resale proceeds.
    """

    p = params
    s = p.quality.value(D)
    p2u = p.alpha * p.v_L * s
    p2n = p.alpha * (1.0 - p.beta) * p.v_L * s + p.v_H * (1.0 - s)
    p1n = p.v_H + p.delta * p.alpha * (1.0 - p.beta) * p.v_L * s
    return Prices(p1n=p1n, p2n=p2n, p2u=p2u)


def profit_total(params: ModelParams, regime: Regime, D):
    """Discounted profit of the active strategy at durability D (vectorized)."""

    p = params
    s = p.quality.value(D)
    c = p.cost.value(D)
    period1 = p.n_H * (p.v_H + p.delta * p.alpha * (1.0 - p.beta) * p.v_L * s - c)
    if regime is Regime.THIRD_PARTY:
        resale_component = p.alpha * (1.0 - p.beta) * p.v_L * s
    else:
        resale_component = p.alpha * p.v_L * s
    period2 = p.delta * p.n_H * (resale_component + p.v_H * (1.0 - s) - c)
    return period1 + period2


@dataclass(frozen=True)
class ProfitBreakdown:
    """Profit decomposition; period 2 is discounted to period-1 value."""

    total: float
    period1: float
    period2: float
    commission: float


def profit(params: ModelParams, regime: Regime, D: float) -> ProfitBreakdown:
    p = params
    s = p.quality.value(D)
    c = p.cost.value(D)
    period1 = p.n_H * (p.v_H + p.delta * p.alpha * (1.0 - p.beta) * p.v_L * s - c)
    if regime is Regime.THIRD_PARTY:
        period2 = p.delta * p.n_H * (
            p.alpha * (1.0 - p.beta) * p.v_L * s + p.v_H * (1.0 - s) - c
        )
        commission = 0.0
    else:
        period2 = p.delta * p.n_H * (p.alpha * p.v_L * s + p.v_H * (1.0 - s) - c)
        # the seller's cut of used sales, already inside period2
        commission = p.delta * p.n_H * p.beta * p.alpha * p.v_L * s
    return ProfitBreakdown(
        total=period1 + period2, period1=period1, period2=period2, commission=commission
    )


def welfare(params: ModelParams, D):
    """Total discounted surplus under the active allocation (vectorized)."""

    p = params
    s = p.quality.value(D)
    c = p.cost.value(D)
    return (
        (1.0 + p.delta) * p.n_H * p.v_H
        + p.delta * p.n_H * p.v_L * s
        - (1.0 + p.delta) * p.n_H * c
    )


def shutdown_profit(params: ModelParams) -> float:
    """Profit from selling only to high types at v_H in both periods."""

    return (1.0 + params.delta) * params.n_H * params.v_H


# Slack >= 0 means the condition holds. ic_h and ir_l bind by construction.
CONSTRAINT_NAMES = ("ic_h", "ic_l", "ir_h", "ir_l", "ir_h_first")
BINDING_CONSTRAINTS = ("ic_h", "ir_l")


def constraint_slacks(params: ModelParams, D: float) -> dict[str, float]:
    """Slacks of the five participation/self-selection conditions.

    Evaluated at the candidate prices for durability ``D``:

    * ``ic_h``: high type prefers selling the used unit and replacing it over
      keeping it (binds).
    * ``ic_l``: low type prefers the used unit over a new one.
    * ``ir_h``: high type gains from the period-2 replacement purchase.
    * ``ir_l``: low type gains from the used purchase (binds).
    * ``ir_h_first``: buying new in period 1 and replacing in period 2 beats
      staying out, at the premium first-period price.
    """

    p = params
    s = p.quality.value(D)
    pr = prices(params, D)
    resale_net = p.v_H - pr.p2n + (1.0 - p.beta) * pr.p2u
    return {
        "ic_h": resale_net - p.v_H * s,
        "ic_l": (p.alpha * p.v_L * s - pr.p2u) - (p.v_L - pr.p2n),
        "ir_h": p.v_H - pr.p2n,
        "ir_l": p.alpha * p.v_L * s - pr.p2u,
        "ir_h_first": (p.v_H - pr.p1n) + p.delta * resale_net,
    }


@dataclass(frozen=True)
class TwoPeriodEquilibrium:
    """Full description of the solved two-period market."""

    regime: Regime
    market_mode: MarketMode
    D_star: float
    D_social: float
    p1n: float
    p2n: float
    p2u: float | None
    profit_total: float
    profit_period1: float
    profit_period2: float
    commission_revenue: float
    welfare: float
    margin: float
    shutdown_profit: float
    boundary_tie: bool
    slacks: dict[str, float] | None
    constraints_ok: bool


def solve(
    params: ModelParams,
    regime: Regime,
    d_max: float = DEFAULT_D_MAX,
    xtol: float = 1e-10,
    slack_tol: float = 1e-9,
) -> TwoPeriodEquilibrium:
    """Solve one regime end to end.

    In the active region the record carries the candidate-price constraint
    slacks; ``constraints_ok`` is False when any slack falls below
    ``-slack_tol``, which happens for parameter corners where the low type
    would rather buy new than used (the construction is then internally
    inconsistent and downstream draws filter such points out).
    """

    margin = activity_margin(params, regime)
    d_social = social_optimal_durability(params, d_max=d_max, xtol=xtol)
    shutdown = shutdown_profit(params)

    if margin > 0.0:
        d_star = _foc_root(params, margin, d_max, xtol)
        pr = prices(params, d_star)
        br = profit(params, regime, d_star)
        slacks = constraint_slacks(params, d_star)
        return TwoPeriodEquilibrium(
            regime=regime,
            market_mode=MarketMode.ACTIVE,
            D_star=d_star,
            D_social=d_social,
            p1n=pr.p1n,
            p2n=pr.p2n,
            p2u=pr.p2u,
            profit_total=br.total,
            profit_period1=br.period1,
            profit_period2=br.period2,
            commission_revenue=br.commission,
            welfare=welfare(params, d_star),
            margin=margin,
            shutdown_profit=shutdown,
            boundary_tie=False,
            slacks=slacks,
            constraints_ok=all(v >= -slack_tol for v in slacks.values()),
        )

    p = params
    return TwoPeriodEquilibrium(
        regime=regime,
        market_mode=MarketMode.SHUTDOWN,
        D_star=0.0,
        D_social=d_social,
        p1n=p.v_H,
        p2n=p.v_H,
        p2u=None,
        profit_total=shutdown,
        profit_period1=p.n_H * p.v_H,
        profit_period2=p.delta * p.n_H * p.v_H,
        commission_revenue=0.0,
        welfare=shutdown,
        margin=margin,
        shutdown_profit=shutdown,
        boundary_tie=margin == 0.0,
        slacks=None,
        constraints_ok=True,
    )

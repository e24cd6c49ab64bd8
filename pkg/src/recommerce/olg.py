"""Infinite-horizon steady state with overlapping two-period customers.

Each period a new cohort of mass one arrives (``n_H`` high types, ``n_L`` low
types) and lives for two periods. The seller posts a stationary new price and
a stationary used price. In the steady state of interest the used stock held
at the start of a period comes from high types only: young high types buy
new, old high types sell their used unit and buy new again, and low types of
both ages buy used. Old low types exit after one more period of use.

Stationary prices coincide with the two-period second-period prices: the used
price extracts the deflated low-type value of a used unit and the new price
leaves old high types indifferent between replacing and keeping. The entry
premium charged to each young high cohort adds the discounted resale proceeds
on top of ``v_H``.

The seller's objective splits into a first-period entry term plus a
stationary per-period stream::

    F(D) = n_H * g1(D) + delta/(1-delta) * R(D)

where ``g1(D) = v_H + delta*alpha*(1-beta)*v_L*s(D)`` and ``R(D)`` is the
per-cohort stationary margin. The first-order condition again factors into
``c'(D) = M * s'(D)`` with

* third-party: ``M = (2-delta)*alpha*(1-beta)*v_L - v_H``
* branded:     ``M = alpha*(2-beta-delta*(1-beta))*v_L - v_H``

whose difference is ``alpha*beta*v_L``, so the branded seller always picks
weakly higher durability. When ``M <= 0`` the seller shuts the used market
down: zero durability and per-period profit ``n_H*v_H``, worth
``n_H*v_H/(1-delta)`` in present value; the objective is extended
continuously there.

Two flat zero-durability mass policies (price ``v_L`` to everyone, or price
``v_H`` to twice the high mass) are reported as diagnostics alongside every
solution. Under this module's per-cohort profit bookkeeping they dominate
every active stream; they are reported, not used to unseat the active
optimum, so that the regime comparison stays informative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

from .primitives import (
    DEFAULT_D_MAX,
    ModelParams,
    Regime,
    bisect_increasing,
)
from .two_period import MarketMode

__all__ = [
    "OlgState",
    "Action",
    "ActionProfile",
    "STEADY_TRADE_PROFILE",
    "OWNER_MENU",
    "NONOWNER_MENU",
    "menu",
    "owns_used",
    "enumerate_profiles",
    "steady_state_prices",
    "entry_price",
    "per_period_profit",
    "per_period_commission",
    "discounted_stream",
    "stream_slope",
    "olg_margin",
    "objective_value",
    "zero_durability_alternatives",
    "constraint_slacks_olg",
    "OLG_CONSTRAINT_NAMES",
    "OLG_BINDING_CONSTRAINTS",
    "FeasibilityReport",
    "check_steady_state",
    "SteadyStateSolution",
    "solve_olg",
]


class OlgState(str, Enum):
    """Start-of-period used stock: which of last period's buyers hold units."""

    NONE = "none"
    HIGH_ONLY = "high-only"
    ALL = "all"

    def fraction(self, params: ModelParams) -> float:
        if self is OlgState.NONE:
            return 0.0
        if self is OlgState.HIGH_ONLY:
            return params.n_H
        return 1.0


class Action(str, Enum):
    BUY_NEW = "buy-new"
    BUY_USED = "buy-used"
    DO_NOTHING = "do-nothing"
    SELL_AND_BUY_NEW = "sell-and-buy-new"
    KEEP_USED = "keep-used"


# menu order is also the enumeration order of candidate profiles
OWNER_MENU = (Action.SELL_AND_BUY_NEW, Action.BUY_NEW, Action.KEEP_USED)
NONOWNER_MENU = (Action.BUY_NEW, Action.BUY_USED, Action.DO_NOTHING)

_CELLS = ("h1", "h2", "l1", "l2")


@dataclass(frozen=True)
class ActionProfile:
    """One action per cohort cell: h1/l1 are young, h2/l2 are old."""

    h1: Action
    h2: Action
    l1: Action
    l2: Action

    def get(self, cell: str) -> Action:
        return getattr(self, cell)


STEADY_TRADE_PROFILE = ActionProfile(
    h1=Action.BUY_NEW,
    h2=Action.SELL_AND_BUY_NEW,
    l1=Action.BUY_USED,
    l2=Action.BUY_USED,
)


def owns_used(state: OlgState, cell: str) -> bool:
    """Whether the cell starts the period holding a used unit."""

    if not cell.endswith("2"):
        return False
    if state is OlgState.ALL:
        return True
    return state is OlgState.HIGH_ONLY and cell == "h2"


def menu(state: OlgState, cell: str) -> tuple[Action, ...]:
    """Actions offered to a cell.

    In the all-hold state every cell is put on the owner menu; for young
    cells the owner actions degenerate (there is nothing to sell or keep),
    and the valuation table maps them accordingly.
    """

    if state is OlgState.ALL:
        return OWNER_MENU
    return OWNER_MENU if owns_used(state, cell) else NONOWNER_MENU


def enumerate_profiles(state: OlgState) -> list[ActionProfile]:
    """All 81 candidate action profiles for a state."""

    menus = [menu(state, cell) for cell in _CELLS]
    return [
        ActionProfile(h1=a, h2=b, l1=c, l2=d)
        for a, b, c, d in itertools.product(*menus)
    ]


def steady_state_prices(params: ModelParams, D) -> tuple:
    """Stationary (new, used) prices; same expressions as the two-period
    second-period prices, and exactly equal to them at equal inputs."""

    p = params
    s = p.quality.value(D)
    p_u = p.alpha * p.v_L * s
    p_n = p.alpha * (1.0 - p.beta) * p.v_L * s + p.v_H * (1.0 - s)
    return p_n, p_u


def entry_price(params: ModelParams, D):
    """Price charged to each entering high cohort: v_H plus resale proceeds."""

    p = params
    return p.v_H + p.delta * p.alpha * (1.0 - p.beta) * p.v_L * p.quality.value(D)


def per_period_profit(params: ModelParams, regime: Regime, D):
    """Stationary per-cohort margin R(D) (vectorized).

    Third-party: the seller nets the new price less cost on the replacement
    sale. Branded: the commission on the used trade is added back, which is
    the same as netting the undiscounted used price.
    """

    p = params
    s = p.quality.value(D)
    c = p.cost.value(D)
    if regime is Regime.THIRD_PARTY:
        return p.n_H * (p.alpha * (1.0 - p.beta) * p.v_L * s + p.v_H * (1.0 - s) - c)
    return p.n_H * (p.alpha * p.v_L * s + p.v_H * (1.0 - s) - c)


def per_period_commission(params: ModelParams, regime: Regime, D) -> float:
    """Commission component inside the branded per-period margin."""

    if regime is Regime.THIRD_PARTY:
        return 0.0
    p = params
    return p.n_H * p.beta * p.alpha * p.v_L * p.quality.value(D)


def discounted_stream(params: ModelParams, regime: Regime, D):
    """Present value of the stationary stream from period 2 on."""

    p = params
    return p.delta / (1.0 - p.delta) * per_period_profit(params, regime, D)


def stream_slope(params: ModelParams, regime: Regime, D):
    """dG/dD where G is the discounted stationary stream."""

    p = params
    sp = p.quality.deriv(D)
    cp = p.cost.deriv(D)
    if regime is Regime.THIRD_PARTY:
        m = p.alpha * (1.0 - p.beta) * p.v_L - p.v_H
    else:
        m = p.alpha * p.v_L - p.v_H
    return p.delta / (1.0 - p.delta) * p.n_H * (m * sp - cp)


def stream_curvature(params: ModelParams, regime: Regime, D):
    """d2G/dD2 where G is the discounted stationary stream."""

    p = params
    spp = p.quality.deriv2(D)
    cpp = p.cost.deriv2(D)
    if regime is Regime.THIRD_PARTY:
        m = p.alpha * (1.0 - p.beta) * p.v_L - p.v_H
    else:
        m = p.alpha * p.v_L - p.v_H
    return p.delta / (1.0 - p.delta) * p.n_H * (m * spp - cpp)


def olg_margin(params: ModelParams, regime: Regime) -> float:
    """Margin in the factored steady-state first-order condition."""

    p = params
    if regime is Regime.THIRD_PARTY:
        return (2.0 - p.delta) * p.alpha * (1.0 - p.beta) * p.v_L - p.v_H
    return p.alpha * (2.0 - p.beta - p.delta * (1.0 - p.beta)) * p.v_L - p.v_H


def objective_value(
    params: ModelParams, regime: Regime, D, include_entry_premium: bool = True
):
    """Seller objective F(D) (vectorized); extended by its own formula at D=0.

    With ``include_entry_premium=False`` only the stationary stream G(D) is
    scored. G is strictly decreasing in D for all admissible parameters (its
    margin ``m*v_L - v_H`` is negative), so that switch always drives the
    maximizer to zero; it exists to make the role of the entry term testable.
    """

    p = params
    stream = discounted_stream(params, regime, D)
    if not include_entry_premium:
        return stream
    return p.n_H * entry_price(params, D) + stream


def zero_durability_alternatives(params: ModelParams) -> dict[str, float]:
    """Present values of the two flat D=0 mass policies (diagnostics only)."""

    p = params
    scale = 1.0 / (1.0 - p.delta)
    return {
        "price_low_everyone": 2.0 * p.v_L * scale,
        "price_high_replacers": 2.0 * p.n_H * p.v_H * scale,
    }


# Slack >= 0 means the condition holds; ic_h2 and ir_l2 bind by construction.
OLG_CONSTRAINT_NAMES = ("ic_h2", "ic_h1", "ir_l2", "ic_l1", "ic_l2", "ratio_cap")
OLG_BINDING_CONSTRAINTS = ("ic_h2", "ir_l2")


def constraint_slacks_olg(params: ModelParams, D: float) -> dict[str, float]:
    """Slacks of the steady-state self-selection and participation conditions.

    Evaluated at the stationary candidate prices:

    * ``ic_h2``: old high types prefer sell-and-replace to keeping (binds).
    * ``ic_h1``: young high types prefer buying new (with the optimal old-age
      continuation) to buying used. The young-high used value carries no
      deflator, mirroring the model's stated comparison.
    * ``ir_l2``: old low types gain from the used purchase (binds).
    * ``ic_l1``: young low types prefer used now to a new unit now plus the
      optimal old-age continuation.
    * ``ic_l2``: old low types prefer used to new.
    * ``ratio_cap``: the closed-form cap on v_L/v_H equivalent to ``ic_l1``.
    """

    p = params
    s = p.quality.value(D)
    p_n, p_u = steady_state_prices(params, D)
    resale_net_h = p.v_H - p_n + (1.0 - p.beta) * p_u
    cont_h = max(resale_net_h, p.v_H * s)
    cont_l = max(p.v_L - p_n + (1.0 - p.beta) * p_u, p.v_L * s)
    used_l = p.alpha * p.v_L * s - p_u
    cap = (1.0 - s) / (1.0 - ((1.0 - p.beta) * p.alpha - p.delta) * s)
    return {
        "ic_h2": resale_net_h - p.v_H * s,
        "ic_h1": (p.v_H - p_n + p.delta * cont_h) - (p.v_H * s - p_u),
        "ir_l2": used_l,
        "ic_l1": used_l - (p.v_L - p_n + p.delta * cont_l),
        "ic_l2": used_l - (p.v_L - p_n),
        "ratio_cap": cap - p.v_L / p.v_H,
    }


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of checking one (state, profile) pair as a steady state."""

    state: OlgState
    profile: ActionProfile
    state_consistent: bool
    used_supply: float
    used_demand: float
    market_clearing: bool
    slacks: dict[str, float] | None
    constraints_ok: bool
    dominated: bool
    dominance_note: str
    candidate_profit: float | None
    alternative_profit: float | None

    @property
    def passes(self) -> bool:
        return (
            self.state_consistent
            and self.market_clearing
            and self.constraints_ok
            and not self.dominated
        )


def _buys_new(action: Action) -> bool:
    return action in (Action.BUY_NEW, Action.SELL_AND_BUY_NEW)


def check_steady_state(
    params: ModelParams,
    D: float,
    state: OlgState,
    profile: ActionProfile,
    slack_tol: float = 1e-9,
) -> FeasibilityReport:
    """Structural feasibility of a candidate steady state.

    Checks, in order: the young actions reproduce the assumed used stock;
    the used market clears (all offered units find buyers, with pro-rata
    rationing of excess demand allowed); the price-taking constraint slacks
    are nonnegative for the trade pattern of interest; and the seller-side
    dominance arguments that knock out whole profile classes. Dominance is
    only applied where a named argument exists: replacement-cycle states,
    keep-used patterns, discard-replace patterns, and empty-stock states.
    """

    p = params
    next_stock = p.n_H * float(_buys_new(profile.h1)) + p.n_L * float(
        _buys_new(profile.l1)
    )
    state_consistent = abs(next_stock - state.fraction(params)) <= 1e-12

    supply = 0.0
    demand = 0.0
    masses = {"h1": p.n_H, "h2": p.n_H, "l1": p.n_L, "l2": p.n_L}
    for cell in _CELLS:
        action = profile.get(cell)
        if action is Action.SELL_AND_BUY_NEW and owns_used(state, cell):
            supply += masses[cell]
        if action is Action.BUY_USED:
            demand += masses[cell]
    if supply == 0.0:
        market_clearing = demand == 0.0
    else:
        market_clearing = demand >= supply - 1e-12

    slacks = constraint_slacks_olg(params, D)
    constraints_ok = all(v >= -slack_tol for v in slacks.values())

    dominated = False
    note = ""
    cand: float | None = None
    alt: float | None = None
    c = p.cost.value(D)
    s = p.quality.value(D)
    if state is OlgState.ALL and state_consistent:
        # whole population on a buy-new/resell cycle: per-period revenue is
        # capped by the low valuation, beaten by flat v_L pricing at D=0
        dominated = True
        note = "all-hold replacement cycle vs zero-durability mass pricing"
        cand = p.v_L * (1.0 + p.delta * s) - c
        alt = 2.0 * p.v_L
    elif state is OlgState.HIGH_ONLY and profile.h2 is Action.KEEP_USED:
        dominated = True
        note = "high keep-used pattern vs selling new to both high cohorts"
        cand = p.n_H * (p.v_H * (1.0 + p.delta * s) - c)
        alt = 2.0 * p.n_H * p.v_H
    elif (
        state is OlgState.HIGH_ONLY
        and profile.h2 is Action.BUY_NEW
        and D > 0.0
    ):
        # discard-and-replace wastes the production cost of durability
        dominated = True
        note = "discard-replace pattern vs the same sales at zero durability"
        cand = 2.0 * p.n_H * (p.v_H - c)
        alt = 2.0 * p.n_H * p.v_H
    elif state is OlgState.NONE and state_consistent:
        dominated = True
        note = "empty-stock state earns nothing on repeat trade"
        cand = 0.0
        alt = 2.0 * max(p.v_L, p.n_H * p.v_H)

    return FeasibilityReport(
        state=state,
        profile=profile,
        state_consistent=state_consistent,
        used_supply=supply,
        used_demand=demand,
        market_clearing=market_clearing,
        slacks=slacks,
        constraints_ok=constraints_ok,
        dominated=dominated,
        dominance_note=note,
        candidate_profit=cand,
        alternative_profit=alt,
    )


@dataclass(frozen=True)
class SteadyStateSolution:
    """Solved stationary policy for one regime."""

    regime: Regime
    market_mode: MarketMode
    state: OlgState
    profile: ActionProfile | None
    D_star: float
    p_n: float
    p_u: float | None
    entry_price: float
    per_period_profit: float
    per_period_commission: float
    discounted_stream: float
    objective_value: float
    margin: float
    used_supply: float
    used_demand: float
    rationed_fraction: float
    include_entry_premium: bool
    slacks: dict[str, float] | None
    constraints_ok: bool
    no_active_steady_state: bool
    best_feasible_D: float
    d0_alternatives: dict[str, float]
    boundary_tie: bool


def _olg_foc_root(params: ModelParams, margin: float, d_max: float, xtol: float) -> float:
    def g(D: float) -> float:
        return params.cost.deriv(D) - margin * params.quality.deriv(D)

    return bisect_increasing(g, 1e-12, d_max, xtol=xtol)


def _cap_boundary(params: ModelParams, hi: float) -> float:
    """Largest durability (up to hi) at which the ratio cap still holds."""

    def slack(D: float) -> float:
        return constraint_slacks_olg(params, D)["ratio_cap"]

    if slack(hi) >= 0.0:
        return hi
    if slack(0.0) < 0.0:
        return 0.0
    # slack decreases in D here; root-find on its negation
    return bisect_increasing(lambda d: -slack(d), 0.0, hi, xtol=1e-12)


def solve_olg(
    params: ModelParams,
    regime: Regime,
    d_max: float = DEFAULT_D_MAX,
    xtol: float = 1e-10,
    include_entry_premium: bool = True,
    slack_tol: float = 1e-9,
) -> SteadyStateSolution:
    """Solve the stationary policy for one regime.

    An exactly zero margin classifies as shutdown and is flagged as a tie.
    ``no_active_steady_state`` is set when the interior candidate violates
    the valuation-ratio cap, in which case ``best_feasible_D`` is the largest
    durability satisfying it (the objective is increasing below the interior
    candidate, so that boundary point is the constrained optimum).
    """

    margin = olg_margin(params, regime)
    d0_alt = zero_durability_alternatives(params)

    if not include_entry_premium:
        # stream-only scoring: G is strictly decreasing, maximizer is D = 0
        d_star = 0.0
        p_n, p_u = steady_state_prices(params, d_star)
        pp = per_period_profit(params, regime, d_star)
        return SteadyStateSolution(
            regime=regime,
            market_mode=MarketMode.SHUTDOWN,
            state=OlgState.HIGH_ONLY,
            profile=None,
            D_star=0.0,
            p_n=p_n,
            p_u=None,
            entry_price=entry_price(params, 0.0),
            per_period_profit=pp,
            per_period_commission=0.0,
            discounted_stream=discounted_stream(params, regime, 0.0),
            objective_value=objective_value(
                params, regime, 0.0, include_entry_premium=False
            ),
            margin=margin,
            used_supply=0.0,
            used_demand=0.0,
            rationed_fraction=0.0,
            include_entry_premium=False,
            slacks=None,
            constraints_ok=True,
            no_active_steady_state=False,
            best_feasible_D=0.0,
            d0_alternatives=d0_alt,
            boundary_tie=False,
        )

    if margin > 0.0:
        d_star = _olg_foc_root(params, margin, d_max, xtol)
        p_n, p_u = steady_state_prices(params, d_star)
        slacks = constraint_slacks_olg(params, d_star)
        constraints_ok = all(v >= -slack_tol for v in slacks.values())
        cap_ok = slacks["ratio_cap"] >= -slack_tol
        best_feasible = d_star if cap_ok else _cap_boundary(params, d_star)
        supply = params.n_H
        demand = 2.0 * params.n_L
        return SteadyStateSolution(
            regime=regime,
            market_mode=MarketMode.ACTIVE,
            state=OlgState.HIGH_ONLY,
            profile=STEADY_TRADE_PROFILE,
            D_star=d_star,
            p_n=p_n,
            p_u=p_u,
            entry_price=entry_price(params, d_star),
            per_period_profit=per_period_profit(params, regime, d_star),
            per_period_commission=per_period_commission(params, regime, d_star),
            discounted_stream=discounted_stream(params, regime, d_star),
            objective_value=objective_value(params, regime, d_star),
            margin=margin,
            used_supply=supply,
            used_demand=demand,
            rationed_fraction=supply / demand,
            include_entry_premium=True,
            slacks=slacks,
            constraints_ok=constraints_ok,
            no_active_steady_state=not cap_ok,
            best_feasible_D=best_feasible,
            d0_alternatives=d0_alt,
            boundary_tie=False,
        )

    p = params
    p_n, _ = steady_state_prices(params, 0.0)
    return SteadyStateSolution(
        regime=regime,
        market_mode=MarketMode.SHUTDOWN,
        state=OlgState.HIGH_ONLY,
        profile=None,
        D_star=0.0,
        p_n=p_n,
        p_u=None,
        entry_price=entry_price(params, 0.0),
        per_period_profit=per_period_profit(params, regime, 0.0),
        per_period_commission=0.0,
        discounted_stream=discounted_stream(params, regime, 0.0),
        objective_value=objective_value(params, regime, 0.0),
        margin=margin,
        used_supply=0.0,
        used_demand=0.0,
        rationed_fraction=0.0,
        include_entry_premium=True,
        slacks=None,
        constraints_ok=True,
        no_active_steady_state=False,
        best_feasible_D=0.0,
        d0_alternatives=d0_alt,
        boundary_tie=margin == 0.0,
    )

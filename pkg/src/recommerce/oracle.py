"""Brute-force cross-checks for the closed-form solvers.

Everything here recomputes objectives from the revenue story directly, using
only the parameter fields and the cost/quality family evaluations. None of
the solver-side formulas (first-order conditions, margins, price identities)
are called, so agreement between this module and the analytic modules is
evidence, not tautology.

Three instruments:

* dense grid search over durability for the two-period profit and the
  steady-state objective;
* horizon-truncated summation of the stationary profit stream, to check the
  closed-form geometric value;
* an exhaustive best-response audit of every candidate steady-state action
  profile at posted prices, including the seller-side feasibility screens.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .primitives import DEFAULT_D_MAX, ModelKind, ModelParams, Regime
from .olg import (
    Action,
    ActionProfile,
    FeasibilityReport,
    OlgState,
    STEADY_TRADE_PROFILE,
    check_steady_state,
    enumerate_profiles,
    menu,
    owns_used,
    steady_state_prices,
)

__all__ = [
    "GridSpec",
    "GridResult",
    "grid_argmax_profit",
    "truncated_stream",
    "truncated_stream_error_bound",
    "action_value",
    "CellAudit",
    "AuditReport",
    "best_response_audit",
    "ScanRow",
    "ScanResult",
    "exhaustive_steady_state_scan",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform durability grid."""

    lower: float = 0.0
    upper: float = DEFAULT_D_MAX
    count: int = 100_000

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("grid needs at least two points")
        if not self.upper > self.lower:
            raise ValueError("grid upper bound must exceed lower bound")

    @property
    def step(self) -> float:
        return (self.upper - self.lower) / (self.count - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.lower, self.upper, self.count)


@dataclass(frozen=True)
class GridResult:
    D_at_max: float
    value: float
    index: int
    step: float


def grid_argmax_profit(
    params: ModelParams,
    regime: Regime,
    model: ModelKind,
    grid: GridSpec | None = None,
    include_entry_premium: bool = True,
) -> GridResult:
    """Maximize the seller objective by brute force over a durability grid.

    Ties resolve to the lowest grid index. The objective is assembled from
    scratch: per-unit revenues times cohort masses, discounted.
    """

    if grid is None:
        grid = GridSpec()
    p = params
    D = grid.points()
    s = p.quality.value(D)
    c = p.cost.value(D)

    used_price = p.alpha * p.v_L * s
    new_price_late = p.alpha * (1.0 - p.beta) * p.v_L * s + p.v_H * (1.0 - s)
    seller_take_late = (
        new_price_late + p.beta * used_price
        if regime is Regime.BRANDED
        else new_price_late
    )
    entry = p.v_H + p.delta * (1.0 - p.beta) * used_price

    if model is ModelKind.TWO_PERIOD:
        value = p.n_H * (entry - c) + p.delta * p.n_H * (seller_take_late - c)
    else:
        stream = p.delta / (1.0 - p.delta) * p.n_H * (seller_take_late - c)
        value = stream if not include_entry_premium else p.n_H * entry + stream

    idx = int(np.argmax(value))
    return GridResult(
        D_at_max=float(D[idx]), value=float(value[idx]), index=idx, step=grid.step
    )


def truncated_stream(
    params: ModelParams, regime: Regime, D: float, horizon: int
) -> float:
    """Sum of the stationary per-period profit over periods 1..horizon,
    discounted one period back, accumulated with compensated summation."""

    p = params
    s = p.quality.value(D)
    c = p.cost.value(D)
    if regime is Regime.THIRD_PARTY:
        r = p.n_H * (p.alpha * (1.0 - p.beta) * p.v_L * s + p.v_H * (1.0 - s) - c)
    else:
        r = p.n_H * (p.alpha * p.v_L * s + p.v_H * (1.0 - s) - c)
    return math.fsum(p.delta**t * r for t in range(1, horizon + 1))


def truncated_stream_error_bound(params: ModelParams, horizon: int) -> float:
    """Relative error bound for the truncated stream vs its closed form:
    the geometric tail plus slack for floating-point accumulation."""

    return params.delta**horizon + 64.0 * sys.float_info.epsilon


_SELECTION_PRIORITY = (
    Action.SELL_AND_BUY_NEW,
    Action.BUY_USED,
    Action.BUY_NEW,
    Action.KEEP_USED,
    Action.DO_NOTHING,
)


def action_value(
    params: ModelParams,
    D: float,
    p_n: float,
    p_u: float,
    state: OlgState,
    cell: str,
    action: Action,
) -> float:
    """Lifetime value of one action for one cohort cell at posted prices.

    Mirrors the steady-state acceptance conditions term for term. Old agents
    live one more period. Young agents who buy new carry the better of
    sell-and-replace or keep into old age; young buyers of used goods get one
    period of service (the unit is spent afterwards), valued without the
    deflator for high types and with it for low types, exactly as the
    acceptance conditions state. Owner-menu actions held by a young cell (the
    all-hold state) degrade: there is nothing to sell or keep.
    """

    p = params
    v = p.v_H if cell.startswith("h") else p.v_L
    s = p.quality.value(D)
    old = cell.endswith("2")
    holds = owns_used(state, cell)

    if old:
        if action is Action.SELL_AND_BUY_NEW:
            proceeds = (1.0 - p.beta) * p_u if holds else 0.0
            return v - p_n + proceeds
        if action is Action.BUY_NEW:
            return v - p_n
        if action is Action.KEEP_USED:
            return v * s if holds else 0.0
        if action is Action.BUY_USED:
            return p.alpha * v * s - p_u
        return 0.0

    if action in (Action.BUY_NEW, Action.SELL_AND_BUY_NEW):
        cont = max(v - p_n + (1.0 - p.beta) * p_u, v * s)
        return v - p_n + p.delta * cont
    if action is Action.BUY_USED:
        if cell.startswith("h"):
            return v * s - p_u
        return p.alpha * v * s - p_u
    return 0.0


@dataclass(frozen=True)
class CellAudit:
    cell: str
    prescribed: Action
    prescribed_value: float
    best_value: float
    attains_max: bool
    selected: Action
    is_selected: bool
    values: dict[Action, float]


@dataclass(frozen=True)
class AuditReport:
    state: OlgState
    profile: ActionProfile
    cells: tuple[CellAudit, ...]
    all_attain: bool
    all_selected: bool


def best_response_audit(
    params: ModelParams,
    D: float,
    state: OlgState,
    profile: ActionProfile,
    p_n: float | None = None,
    p_u: float | None = None,
    tol: float = 1e-12,
) -> AuditReport:
    """Check each cell's prescribed action against its full menu.

    ``attains_max`` is weak attainment within ``tol``; ``is_selected``
    additionally applies the deterministic tie-break (trade-creating actions
    first: sell-and-replace over keeping, buying used over doing nothing),
    which is how binding indifference conditions are resolved.
    """

    if p_n is None or p_u is None:
        p_n, p_u = steady_state_prices(params, D)

    cells = []
    for cell in ("h1", "h2", "l1", "l2"):
        choices = menu(state, cell)
        values = {
            a: action_value(params, D, p_n, p_u, state, cell, a) for a in choices
        }
        best = max(values.values())
        attaining = {a for a, val in values.items() if val >= best - tol}
        selected = next(a for a in _SELECTION_PRIORITY if a in attaining)
        prescribed = profile.get(cell)
        pv = values[prescribed]
        cells.append(
            CellAudit(
                cell=cell,
                prescribed=prescribed,
                prescribed_value=pv,
                best_value=best,
                attains_max=pv >= best - tol,
                selected=selected,
                is_selected=selected is prescribed,
                values=values,
            )
        )

    cells = tuple(cells)
    return AuditReport(
        state=state,
        profile=profile,
        cells=cells,
        all_attain=all(c.attains_max for c in cells),
        all_selected=all(c.is_selected for c in cells),
    )


@dataclass(frozen=True)
class ScanRow:
    state: OlgState
    profile: ActionProfile
    feasibility: FeasibilityReport
    audit: AuditReport

    @property
    def passes(self) -> bool:
        return self.feasibility.passes and self.audit.all_selected


@dataclass(frozen=True)
class ScanResult:
    D: float
    p_n: float
    p_u: float
    rows: tuple[ScanRow, ...]

    @property
    def survivors(self) -> tuple[ScanRow, ...]:
        return tuple(r for r in self.rows if r.passes)

    @property
    def unique_survivor_is_trade_pattern(self) -> bool:
        surv = self.survivors
        return (
            len(surv) == 1
            and surv[0].state is OlgState.HIGH_ONLY
            and surv[0].profile == STEADY_TRADE_PROFILE
        )


def exhaustive_steady_state_scan(params: ModelParams, D: float) -> ScanResult:
    """Audit all candidate (state, profile) pairs at the posted prices.

    Enumerates every action profile in every start-of-period stock state
    (81 per state), applying the structural feasibility checks and the
    best-response audit. In the active region exactly one pair should
    survive: the high-only stock with the buy/sell-and-replace/used-used
    trade pattern.
    """

    p_n, p_u = steady_state_prices(params, D)
    rows = []
    for state in OlgState:
        for profile in enumerate_profiles(state):
            feas = check_steady_state(params, D, state, profile)
            audit = best_response_audit(params, D, state, profile, p_n=p_n, p_u=p_u)
            rows.append(ScanRow(state=state, profile=profile, feasibility=feas, audit=audit))
    return ScanResult(D=D, p_n=p_n, p_u=p_u, rows=tuple(rows))

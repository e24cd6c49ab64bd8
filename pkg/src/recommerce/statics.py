"""Comparative statics, regime comparison, and the property-verification engine.

Three layers:

* closed-form envelope derivatives of maximized profit with respect to the
  deflator, the commission, and the discount factor, next to centered
  finite differences of the re-solved value function;
* sweep and comparison drivers that produce plot-ready tables (parameter
  sweeps, the commission curve, side-by-side regime reports);
* a seeded property harness that re-derives the package's headline claims on
  random parameter draws and cross-checks every optimum against the
  brute-force oracle. The harness is what the CLI ``verify`` subcommand runs
  and what the acceptance suite calls at larger scale.

Draws are uniform over a documented box (high valuation normalized to 1,
low valuation in [0.5, 1), deflator in [0.6, 1], commission in [0, 0.6],
discount in [0.5, 0.95], high share in [0.1, 0.6] with shares summing to 1),
with rejection filters onto the regions each property speaks about:
margin-active per (model, regime), both-regime active with all price-taking
constraints satisfied at the optimum, and ladder headroom for the local
monotonicity probes.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .primitives import (
    DEFAULT_D_MAX,
    ModelKind,
    ModelParams,
    PowerCost,
    Regime,
    SaturatingExpQuality,
    bisect_increasing_vec,
    validate_params,
)
from . import olg as olg_mod
from . import oracle as oracle_mod
from . import two_period as tp

__all__ = [
    "envelope_profit_derivative",
    "envelope_dpi_dalpha",
    "envelope_dpi_dbeta",
    "value_function",
    "fd_profit_derivative",
    "SweepPoint",
    "ComparativeReport",
    "monotonicity_sweep",
    "CommissionCurve",
    "optimal_commission",
    "RegimeComparison",
    "regime_comparison",
    "ParamBox",
    "DEFAULT_BOX",
    "sample_params",
    "margin_active",
    "equilibrium_feasible",
    "ladder_active",
    "sample_filtered",
    "two_period_pool",
    "olg_pool",
    "foc_pool",
    "admissible_olg_pool",
    "PropertyResult",
    "PROPERTY_NAMES",
    "run_verification",
]

_SWEEPABLE = ("alpha", "beta", "delta")


# ======================================================================
# envelope derivatives and the value function
# ======================================================================


def envelope_profit_derivative(
    params: ModelParams,
    regime: Regime,
    wrt: str,
    model: ModelKind = ModelKind.TWO_PERIOD,
    D_star: float | None = None,
    d_max: float = DEFAULT_D_MAX,
) -> float:
    """d(maximized profit)/d(parameter), holding D at its optimum.

    Because D* satisfies the first-order condition, the derivative of the
    maximized objective equals the partial derivative of the objective at
    D*. In the shutdown region the maximized value is the high-type-only
    profit, which does not involve the deflator or the commission.
    """

    if wrt not in _SWEEPABLE:
        raise ValueError(f"unsupported parameter {wrt!r}; expected one of {_SWEEPABLE}")
    p = params

    if model is ModelKind.TWO_PERIOD:
        if D_star is None:
            if tp.activity_margin(params, regime) <= 0.0:
                if wrt == "delta":
                    return p.n_H * p.v_H
                return 0.0
            D_star = tp.optimal_durability(params, regime, d_max=d_max)
        s = p.quality.value(D_star)
        c = p.cost.value(D_star)
        if wrt == "alpha":
            factor = 2.0 - 2.0 * p.beta if regime is Regime.THIRD_PARTY else 2.0 - p.beta
            return p.n_H * p.delta * factor * p.v_L * s
        if wrt == "beta":
            factor = 2.0 if regime is Regime.THIRD_PARTY else 1.0
            return -factor * p.n_H * p.delta * p.alpha * p.v_L * s
        resale = (
            p.alpha * (1.0 - p.beta) * p.v_L * s
            if regime is Regime.THIRD_PARTY
            else p.alpha * p.v_L * s
        )
        return p.n_H * p.alpha * (1.0 - p.beta) * p.v_L * s + p.n_H * (
            resale + p.v_H * (1.0 - s) - c
        )

    if D_star is None:
        if olg_mod.olg_margin(params, regime) <= 0.0:
            if wrt == "delta":
                return p.n_H * p.v_H / (1.0 - p.delta) ** 2
            return 0.0
        D_star = olg_mod.solve_olg(params, regime, d_max=d_max).D_star
    s = p.quality.value(D_star)
    if wrt == "alpha":
        if regime is Regime.THIRD_PARTY:
            return p.n_H * p.delta * (1.0 - p.beta) * p.v_L * s * (2.0 - p.delta) / (
                1.0 - p.delta
            )
        return p.n_H * p.delta * p.v_L * s * ((1.0 - p.beta) + 1.0 / (1.0 - p.delta))
    if wrt == "beta":
        if regime is Regime.THIRD_PARTY:
            return (
                -p.n_H * p.delta * p.alpha * p.v_L * s * (2.0 - p.delta) / (1.0 - p.delta)
            )
        return -p.n_H * p.delta * p.alpha * p.v_L * s
    r = olg_mod.per_period_profit(params, regime, D_star)
    return p.n_H * p.alpha * (1.0 - p.beta) * p.v_L * s + r / (1.0 - p.delta) ** 2


def envelope_dpi_dalpha(params: ModelParams, regime: Regime, D_star: float) -> float:
    """Deflator sensitivity of maximized two-period profit at a given D*."""

    return envelope_profit_derivative(
        params, regime, "alpha", ModelKind.TWO_PERIOD, D_star=D_star
    )


def envelope_dpi_dbeta(params: ModelParams, regime: Regime, D_star: float) -> float:
    """Commission sensitivity of maximized two-period profit at a given D*."""

    return envelope_profit_derivative(
        params, regime, "beta", ModelKind.TWO_PERIOD, D_star=D_star
    )


def value_function(
    params: ModelParams,
    regime: Regime,
    model: ModelKind = ModelKind.TWO_PERIOD,
    d_max: float = DEFAULT_D_MAX,
) -> float:
    """Maximized objective as a function of the primitives (re-solves D*)."""

    if model is ModelKind.TWO_PERIOD:
        if tp.activity_margin(params, regime) <= 0.0:
            return tp.shutdown_profit(params)
        d_star = tp.optimal_durability(params, regime, d_max=d_max)
        return tp.profit(params, regime, d_star).total
    sol = olg_mod.solve_olg(params, regime, d_max=d_max)
    return sol.objective_value


def fd_profit_derivative(
    params: ModelParams,
    regime: Regime,
    wrt: str,
    model: ModelKind = ModelKind.TWO_PERIOD,
    h: float = 1e-5,
    d_max: float = DEFAULT_D_MAX,
) -> float:
    """Centered finite difference of the value function, re-solving D* at
    each perturbed parameter value (the total derivative the envelope
    theorem predicts). Evaluation may step just outside the admissible box;
    all formulas extend continuously there."""

    if wrt not in _SWEEPABLE:
        raise ValueError(f"unsupported parameter {wrt!r}; expected one of {_SWEEPABLE}")
    base = getattr(params, wrt)
    hi = dataclasses.replace(params, **{wrt: base + h})
    lo = dataclasses.replace(params, **{wrt: base - h})
    return (
        value_function(hi, regime, model, d_max) - value_function(lo, regime, model, d_max)
    ) / (2.0 * h)


# ======================================================================
# sweeps
# ======================================================================


@dataclass(frozen=True)
class SweepPoint:
    param_value: float
    regime: Regime
    market_mode: tp.MarketMode
    D_star: float
    profit: float
    welfare: float
    envelope_deriv: float
    fd_deriv: float


@dataclass(frozen=True)
class ComparativeReport:
    """One regime's sweep along one parameter, with monotonicity verdicts."""

    parameter: str
    model: ModelKind
    regime: Regime
    points: tuple[SweepPoint, ...]
    verdicts: dict[str, str]
    shutdown_points: int


def _direction(values: Sequence[float]) -> str:
    if len(values) < 2:
        return "not-applicable"
    diffs = np.diff(np.asarray(values, dtype=float))
    if np.all(diffs > 0.0):
        return "strictly-increasing"
    if np.all(diffs < 0.0):
        return "strictly-decreasing"
    if np.all(diffs == 0.0):
        return "constant"
    return "non-monotone"


def monotonicity_sweep(
    params: ModelParams,
    regime: Regime,
    parameter: str,
    values: Sequence[float],
    model: ModelKind = ModelKind.TWO_PERIOD,
    fd_step: float = 1e-5,
    d_max: float = DEFAULT_D_MAX,
) -> ComparativeReport:
    """Solve along a parameter grid and classify the directions of D*, the
    maximized profit, and (two-period only) welfare.

    Shutdown points are reported in the table but excluded from the
    monotonicity verdicts. The discount factor is sweepable for diagnostic
    purposes; no directional claim is attached to it beyond the verdict
    strings themselves.
    """

    if parameter not in _SWEEPABLE:
        raise ValueError(
            f"unsupported parameter {parameter!r}; expected one of {_SWEEPABLE}"
        )
    points: list[SweepPoint] = []
    for value in values:
        pt = dataclasses.replace(params, **{parameter: float(value)})
        if model is ModelKind.TWO_PERIOD:
            eq = tp.solve(pt, regime, d_max=d_max)
            mode, d_star, profit = eq.market_mode, eq.D_star, eq.profit_total
            wel = eq.welfare
        else:
            sol = olg_mod.solve_olg(pt, regime, d_max=d_max)
            mode, d_star, profit = sol.market_mode, sol.D_star, sol.objective_value
            wel = math.nan
        env = envelope_profit_derivative(pt, regime, parameter, model, d_max=d_max)
        fd = fd_profit_derivative(pt, regime, parameter, model, h=fd_step, d_max=d_max)
        points.append(
            SweepPoint(
                param_value=float(value),
                regime=regime,
                market_mode=mode,
                D_star=d_star,
                profit=profit,
                welfare=wel,
                envelope_deriv=env,
                fd_deriv=fd,
            )
        )

    active = [pt for pt in points if pt.market_mode is tp.MarketMode.ACTIVE]
    verdicts = {
        "durability": _direction([pt.D_star for pt in active]),
        "profit": _direction([pt.profit for pt in active]),
        "welfare": (
            _direction([pt.welfare for pt in active])
            if model is ModelKind.TWO_PERIOD
            else "not-applicable"
        ),
    }
    return ComparativeReport(
        parameter=parameter,
        model=model,
        regime=regime,
        points=tuple(points),
        verdicts=verdicts,
        shutdown_points=len(points) - len(active),
    )


# ======================================================================
# commission curve
# ======================================================================


@dataclass(frozen=True)
class CommissionCurve:
    """Maximized profit under the branded regime as the commission varies."""

    model: ModelKind
    betas: np.ndarray
    d_stars: np.ndarray
    profits: np.ndarray
    active: np.ndarray
    beta_star: float
    profit_at_star: float
    argmax_index: int


def optimal_commission(
    params: ModelParams,
    model: ModelKind = ModelKind.TWO_PERIOD,
    n_points: int = 1001,
    d_max: float = DEFAULT_D_MAX,
) -> CommissionCurve:
    """Brute-force the branded profit over a commission grid on [0, 1).

    Lanes with a positive activity margin are solved by vectorized bisection
    of the shared first-order condition; the rest carry the commission-free
    shutdown value. Ties in the argmax resolve to the lowest index.
    """

    p = params
    betas = np.linspace(0.0, 1.0, n_points, endpoint=False)
    if model is ModelKind.TWO_PERIOD:
        margins = p.alpha * (2.0 - betas) * p.v_L - p.v_H
        k = p.delta / (1.0 + p.delta)
        shutdown = (1.0 + p.delta) * p.n_H * p.v_H
    else:
        margins = p.alpha * (2.0 - betas - p.delta * (1.0 - betas)) * p.v_L - p.v_H
        k = 1.0
        shutdown = p.n_H * p.v_H / (1.0 - p.delta)

    active = margins > 0.0
    d_stars = np.zeros_like(betas)
    if np.any(active):
        m_act = margins[active]

        def residual(mids: np.ndarray) -> np.ndarray:
            return p.cost.deriv(mids) - k * m_act * p.quality.deriv(mids)

        roots = bisect_increasing_vec(residual, 1e-12, d_max, int(m_act.size))
        # a margin so large that the root escapes the bracket pins to d_max
        overflow = residual(np.full(m_act.size, d_max)) < 0.0
        d_stars[active] = np.where(overflow, d_max, roots)

    s = p.quality.value(d_stars)
    c = p.cost.value(d_stars)
    if model is ModelKind.TWO_PERIOD:
        value = p.n_H * (
            p.v_H + p.delta * p.alpha * (1.0 - betas) * p.v_L * s - c
        ) + p.delta * p.n_H * (p.alpha * p.v_L * s + p.v_H * (1.0 - s) - c)
    else:
        value = p.n_H * (
            p.v_H + p.delta * p.alpha * (1.0 - betas) * p.v_L * s
        ) + p.delta / (1.0 - p.delta) * p.n_H * (
            p.alpha * p.v_L * s + p.v_H * (1.0 - s) - c
        )
    profits = np.where(active, value, shutdown)

    idx = int(np.argmax(profits))
    return CommissionCurve(
        model=model,
        betas=betas,
        d_stars=d_stars,
        profits=profits,
        active=active,
        beta_star=float(betas[idx]),
        profit_at_star=float(profits[idx]),
        argmax_index=idx,
    )


# ======================================================================
# regime comparison
# ======================================================================


@dataclass(frozen=True)
class RegimeComparison:
    """Side-by-side solve of both regimes in both models, with deltas."""

    two_period: dict[Regime, tp.TwoPeriodEquilibrium]
    olg: dict[Regime, olg_mod.SteadyStateSolution]
    both_active_two_period: bool
    both_active_olg: bool
    d_durability: float
    d_profit: float
    d_welfare: float
    gap_third_party: float
    gap_branded: float
    olg_d_durability: float
    olg_d_objective: float


def regime_comparison(
    params: ModelParams, d_max: float = DEFAULT_D_MAX
) -> RegimeComparison:
    """Branded-minus-third-party deltas plus per-regime sustainability gaps.

    When a regime is shut down its D* is zero and the deltas are still
    reported (one-sided comparison against the shutdown values).
    """

    eq_t = tp.solve(params, Regime.THIRD_PARTY, d_max=d_max)
    eq_b = tp.solve(params, Regime.BRANDED, d_max=d_max)
    ss_t = olg_mod.solve_olg(params, Regime.THIRD_PARTY, d_max=d_max)
    ss_b = olg_mod.solve_olg(params, Regime.BRANDED, d_max=d_max)
    return RegimeComparison(
        two_period={Regime.THIRD_PARTY: eq_t, Regime.BRANDED: eq_b},
        olg={Regime.THIRD_PARTY: ss_t, Regime.BRANDED: ss_b},
        both_active_two_period=(
            eq_t.market_mode is tp.MarketMode.ACTIVE
            and eq_b.market_mode is tp.MarketMode.ACTIVE
        ),
        both_active_olg=(
            ss_t.market_mode is tp.MarketMode.ACTIVE
            and ss_b.market_mode is tp.MarketMode.ACTIVE
        ),
        d_durability=eq_b.D_star - eq_t.D_star,
        d_profit=eq_b.profit_total - eq_t.profit_total,
        d_welfare=eq_b.welfare - eq_t.welfare,
        gap_third_party=eq_t.D_social - eq_t.D_star,
        gap_branded=eq_b.D_social - eq_b.D_star,
        olg_d_durability=ss_b.D_star - ss_t.D_star,
        olg_d_objective=ss_b.objective_value - ss_t.objective_value,
    )


# ======================================================================
# random draws
# ======================================================================


@dataclass(frozen=True)
class ParamBox:
    """Uniform sampling box for property draws (v_H normalized to 1)."""

    v_L: tuple[float, float] = (0.5, 1.0)
    alpha: tuple[float, float] = (0.6, 1.0)
    beta: tuple[float, float] = (0.0, 0.6)
    delta: tuple[float, float] = (0.5, 0.95)
    n_H: tuple[float, float] = (0.1, 0.6)


DEFAULT_BOX = ParamBox()

_DRAW_COST = PowerCost(c0=0.5, p=2.0)
_DRAW_QUALITY = SaturatingExpQuality(s_bar=1.0, k=1.0)

LADDER_STEP = 0.005
LADDER_POINTS = 5
_LADDER_SPAN = LADDER_STEP * (LADDER_POINTS - 1)


def sample_params(rng: np.random.Generator, box: ParamBox = DEFAULT_BOX) -> ModelParams:
    """One raw draw from the box (no admissibility or activity filtering)."""

    n_h = rng.uniform(*box.n_H)
    return ModelParams(
        v_H=1.0,
        v_L=rng.uniform(*box.v_L),
        n_H=n_h,
        n_L=1.0 - n_h,
        delta=rng.uniform(*box.delta),
        alpha=rng.uniform(*box.alpha),
        beta=rng.uniform(*box.beta),
        cost=_DRAW_COST,
        quality=_DRAW_QUALITY,
    )


def margin_active(params: ModelParams, model: ModelKind, regime: Regime) -> bool:
    if model is ModelKind.TWO_PERIOD:
        return tp.activity_margin(params, regime) > 0.0
    return olg_mod.olg_margin(params, regime) > 0.0


def equilibrium_feasible(
    params: ModelParams,
    model: ModelKind,
    regime: Regime,
    d_max: float = DEFAULT_D_MAX,
    slack_tol: float = 1e-9,
) -> bool:
    """Margin positive and every price-taking constraint satisfied at D*."""

    if not margin_active(params, model, regime):
        return False
    if model is ModelKind.TWO_PERIOD:
        d_star = tp.optimal_durability(params, regime, d_max=d_max)
        slacks = tp.constraint_slacks(params, d_star)
    else:
        d_star = olg_mod.solve_olg(params, regime, d_max=d_max).D_star
        slacks = olg_mod.constraint_slacks_olg(params, d_star)
    return all(v >= -slack_tol for v in slacks.values())


def ladder_active(params: ModelParams, model: ModelKind = ModelKind.TWO_PERIOD) -> bool:
    """Margins stay positive across the local ladder ranges of both regimes.

    The deflator ladder climbs (which only raises margins) and the commission
    ladder climbs (which lowers them), so it suffices to check the top of the
    commission ladder and that the deflator ladder stays inside [0, 1].
    """

    if params.alpha + _LADDER_SPAN > 1.0:
        return False
    worst = dataclasses.replace(params, beta=params.beta + _LADDER_SPAN)
    return all(
        margin_active(worst, model, regime)
        for regime in (Regime.THIRD_PARTY, Regime.BRANDED)
    )


def sample_filtered(
    n: int,
    seed_key: Sequence[int],
    predicate: Callable[[ModelParams], bool],
    box: ParamBox = DEFAULT_BOX,
    max_attempts: int | None = None,
) -> list[ModelParams]:
    """Rejection-sample ``n`` draws satisfying ``predicate``, deterministically."""

    rng = np.random.default_rng(list(seed_key))
    cap = max_attempts if max_attempts is not None else max(200_000, 2000 * n)
    out: list[ModelParams] = []
    for _ in range(cap):
        cand = sample_params(rng, box)
        if predicate(cand):
            out.append(cand)
            if len(out) == n:
                return out
    raise RuntimeError(
        f"rejection sampling exhausted {cap} attempts with {len(out)}/{n} accepted"
    )


def two_period_pool(n: int, seed: int, d_max: float = DEFAULT_D_MAX) -> list[ModelParams]:
    """Both-active two-period draws with ladder headroom.

    Accepts a draw when the two-period admissibility checks pass, margins of
    both regimes remain positive across the local parameter ladders, and all
    five price-taking constraints hold at both regimes' optima.
    """

    def ok(cand: ModelParams) -> bool:
        if not validate_params(cand, ModelKind.TWO_PERIOD).ok:
            return False
        if not ladder_active(cand, ModelKind.TWO_PERIOD):
            return False
        return all(
            equilibrium_feasible(cand, ModelKind.TWO_PERIOD, regime, d_max)
            for regime in (Regime.THIRD_PARTY, Regime.BRANDED)
        )

    return sample_filtered(n, (seed, 1), ok)


def olg_pool(n: int, seed: int, d_max: float = DEFAULT_D_MAX) -> list[ModelParams]:
    """Both-active steady-state draws: margins positive in both regimes and
    the full constraint set (including the valuation-ratio cap) satisfied at
    both regimes' optimal durabilities."""

    def ok(cand: ModelParams) -> bool:
        if not validate_params(cand, ModelKind.OLG).ok:
            return False
        return all(
            equilibrium_feasible(cand, ModelKind.OLG, regime, d_max)
            for regime in (Regime.THIRD_PARTY, Regime.BRANDED)
        )

    return sample_filtered(n, (seed, 2), ok)


def foc_pool(
    n: int, seed: int, model: ModelKind, regime: Regime
) -> list[ModelParams]:
    """Admissible margin-active draws for one (model, regime) cell."""

    tag = 10 * (1 + list(ModelKind).index(model)) + list(Regime).index(regime)

    def ok(cand: ModelParams) -> bool:
        return validate_params(cand, model).ok and margin_active(cand, model, regime)

    return sample_filtered(n, (seed, 3, tag), ok)


def admissible_olg_pool(n: int, seed: int) -> list[ModelParams]:
    """Admissible draws with no activity filtering at all."""

    def ok(cand: ModelParams) -> bool:
        return validate_params(cand, ModelKind.OLG).ok

    return sample_filtered(n, (seed, 4), ok)


# ======================================================================
# property harness
# ======================================================================


@dataclass(frozen=True)
class PropertyResult:
    name: str
    checks: int
    violations: int
    detail: str
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _params_payload(params: ModelParams, **extra) -> dict:
    from .primitives import params_to_dict

    payload = {"params": params_to_dict(params)}
    payload.update(extra)
    return payload


def _prop_foc_grid(
    pools: dict[tuple[ModelKind, Regime], list[ModelParams]],
    grid_points: int,
    d_max: float,
) -> PropertyResult:
    """Analytic optimum vs dense-grid argmax, per (model, regime) draw pool."""

    checks = violations = 0
    example = None
    notes = []
    grid = oracle_mod.GridSpec(0.0, d_max, grid_points)
    for (model, regime), pool in sorted(
        pools.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)
    ):
        worst = 0.0
        for params in pool:
            if model is ModelKind.TWO_PERIOD:
                d_star = tp.optimal_durability(params, regime, d_max=d_max)
            else:
                d_star = olg_mod.solve_olg(params, regime, d_max=d_max).D_star
            hit = oracle_mod.grid_argmax_profit(params, regime, model, grid)
            gap = abs(d_star - hit.D_at_max)
            worst = max(worst, gap)
            checks += 1
            if gap > grid.step:
                violations += 1
                if example is None:
                    example = _params_payload(
                        params,
                        model=model.value,
                        regime=regime.value,
                        solver_D=d_star,
                        grid_D=hit.D_at_max,
                    )
        notes.append(f"{model.value}/{regime.value} worst gap {worst:.3e}")
    return PropertyResult(
        name="foc-grid-agreement",
        checks=checks,
        violations=violations,
        detail=f"grid step {grid.step:.2e}; " + "; ".join(notes),
        counterexample=example,
    )


_CANONICAL_TARGETS = {
    "third_party": 0.0673,
    "branded": 0.1238,
    "social": 0.285,
}


def _prop_canonical(grid_points: int, d_max: float) -> PropertyResult:
    """Regression against the frozen worked-example durabilities, each
    re-confirmed live against the grid oracle."""

    from .primitives import canonical_params

    params = canonical_params()
    grid = oracle_mod.GridSpec(0.0, d_max, grid_points)
    d_t = tp.optimal_durability(params, Regime.THIRD_PARTY, d_max=d_max)
    d_b = tp.optimal_durability(params, Regime.BRANDED, d_max=d_max)
    d_s = tp.social_optimal_durability(params, d_max=d_max)

    checks = violations = 0
    failures = []
    for label, value in (("third_party", d_t), ("branded", d_b), ("social", d_s)):
        checks += 1
        if abs(value - _CANONICAL_TARGETS[label]) > 1e-3:
            violations += 1
            failures.append(f"{label}={value!r}")
    for regime, value in ((Regime.THIRD_PARTY, d_t), (Regime.BRANDED, d_b)):
        hit = oracle_mod.grid_argmax_profit(params, regime, ModelKind.TWO_PERIOD, grid)
        checks += 1
        if abs(value - hit.D_at_max) > grid.step:
            violations += 1
            failures.append(f"oracle[{regime.value}]={hit.D_at_max!r}")
    example = None
    if violations:
        example = _params_payload(params, failures=failures)
    return PropertyResult(
        name="canonical-regression",
        checks=checks,
        violations=violations,
        detail=(
            f"D_T={d_t:.6f} D_B={d_b:.6f} D_social={d_s:.6f} "
            f"targets {_CANONICAL_TARGETS} (tol 1e-3)"
        ),
        counterexample=example,
    )


def _ladder_values(
    params: ModelParams, regime: Regime, wrt: str, d_max: float
) -> tuple[list[float], list[float]]:
    d_vals, pi_vals = [], []
    for i in range(LADDER_POINTS):
        pt = dataclasses.replace(params, **{wrt: getattr(params, wrt) + i * LADDER_STEP})
        d_star = tp.optimal_durability(pt, regime, d_max=d_max)
        d_vals.append(d_star)
        pi_vals.append(tp.profit(pt, regime, d_star).total)
    return d_vals, pi_vals


def _prop_ladders(pool: list[ModelParams], d_max: float) -> PropertyResult:
    """Local monotonicity: D* and maximized profit strictly rise along a
    deflator ladder and strictly fall along a commission ladder."""

    checks = violations = 0
    example = None
    for params in pool:
        for regime in (Regime.THIRD_PARTY, Regime.BRANDED):
            d_a, pi_a = _ladder_values(params, regime, "alpha", d_max)
            d_b, pi_b = _ladder_values(params, regime, "beta", d_max)
            checks += 1
            ok = (
                all(x < y for x, y in zip(d_a, d_a[1:]))
                and all(x < y for x, y in zip(pi_a, pi_a[1:]))
                and all(x > y for x, y in zip(d_b, d_b[1:]))
                and all(x > y for x, y in zip(pi_b, pi_b[1:]))
            )
            if not ok:
                violations += 1
                if example is None:
                    example = _params_payload(
                        params, regime=regime.value, alpha_D=d_a, beta_D=d_b
                    )
    return PropertyResult(
        name="alpha-beta-ladders",
        checks=checks,
        violations=violations,
        detail=(
            f"{LADDER_POINTS}-point ladders, step {LADDER_STEP}, both regimes, "
            "strict monotonicity of D* and maximized profit"
        ),
        counterexample=example,
    )


def _prop_durability_premium(
    pool_tp: list[ModelParams], pool_olg: list[ModelParams], d_max: float
) -> PropertyResult:
    """Branded durability strictly exceeds third-party durability."""

    checks = violations = 0
    example = None
    for params in pool_tp:
        d_t = tp.optimal_durability(params, Regime.THIRD_PARTY, d_max=d_max)
        d_b = tp.optimal_durability(params, Regime.BRANDED, d_max=d_max)
        checks += 1
        if not d_b > d_t:
            violations += 1
            if example is None:
                example = _params_payload(params, model="two-period", D_T=d_t, D_B=d_b)
    for params in pool_olg:
        d_t = olg_mod.solve_olg(params, Regime.THIRD_PARTY, d_max=d_max).D_star
        d_b = olg_mod.solve_olg(params, Regime.BRANDED, d_max=d_max).D_star
        checks += 1
        if not d_b > d_t:
            violations += 1
            if example is None:
                example = _params_payload(params, model="olg", D_T=d_t, D_B=d_b)
    return PropertyResult(
        name="branded-durability-premium",
        checks=checks,
        violations=violations,
        detail="D*_branded > D*_third-party on every both-active draw, both models",
        counterexample=example,
    )


def _prop_commission_argmax(
    pool_tp: list[ModelParams],
    pool_olg: list[ModelParams],
    n_points: int,
    d_max: float,
) -> PropertyResult:
    """The branded profit curve over the commission grid peaks at zero and
    falls strictly across its active stretch, in both models."""

    checks = violations = 0
    example = None
    for model, pool in ((ModelKind.TWO_PERIOD, pool_tp), (ModelKind.OLG, pool_olg)):
        for params in pool:
            curve = optimal_commission(params, model, n_points=n_points, d_max=d_max)
            active_profits = curve.profits[curve.active]
            checks += 1
            ok = curve.argmax_index == 0 and bool(
                np.all(np.diff(active_profits) < 0.0)
            )
            if not ok:
                violations += 1
                if example is None:
                    example = _params_payload(
                        params, model=model.value, argmax_beta=curve.beta_star
                    )
    return PropertyResult(
        name="commission-argmax-zero",
        checks=checks,
        violations=violations,
        detail=f"{n_points}-point commission grid on [0,1), both models",
        counterexample=example,
    )


def _prop_alpha_envelope(
    pool_tp: list[ModelParams], pool_olg: list[ModelParams], d_max: float
) -> PropertyResult:
    """Two claims per draw: the branded commission-free deflator sensitivity
    weakly dominates the third-party sensitivity at every tested commission
    (strictly for positive commissions), and envelope derivatives agree with
    centered finite differences of the re-solved value function."""

    checks = violations = 0
    example = None
    for params in pool_tp:
        base_b0 = dataclasses.replace(params, beta=0.0)
        lhs = envelope_profit_derivative(base_b0, Regime.BRANDED, "alpha")
        for frac in (0.0, 0.5, 1.0):
            beta_t = params.beta * frac
            pt = dataclasses.replace(params, beta=beta_t)
            rhs = envelope_profit_derivative(pt, Regime.THIRD_PARTY, "alpha")
            checks += 1
            ok = lhs > rhs if beta_t > 0.0 else lhs >= rhs - 1e-12
            if not ok:
                violations += 1
                if example is None:
                    example = _params_payload(params, beta_tested=beta_t, lhs=lhs, rhs=rhs)

    h = 1e-5
    for model, pool in ((ModelKind.TWO_PERIOD, pool_tp), (ModelKind.OLG, pool_olg)):
        for params in pool:
            for regime in (Regime.THIRD_PARTY, Regime.BRANDED):
                for wrt in ("alpha", "beta"):
                    # the centered difference is a one-branch derivative
                    # estimate only when both perturbed points stay on the
                    # active side of the shutdown boundary
                    interior = all(
                        margin_active(
                            dataclasses.replace(
                                params, **{wrt: getattr(params, wrt) + d}
                            ),
                            model,
                            regime,
                        )
                        for d in (-h, h)
                    )
                    if not interior:
                        continue
                    env = envelope_profit_derivative(params, regime, wrt, model, d_max=d_max)
                    if abs(env) <= 1e-8:
                        continue
                    fd = fd_profit_derivative(params, regime, wrt, model, h=h, d_max=d_max)
                    checks += 1
                    if abs(env - fd) / abs(env) > 1e-4:
                        violations += 1
                        if example is None:
                            example = _params_payload(
                                params,
                                model=model.value,
                                regime=regime.value,
                                wrt=wrt,
                                envelope=env,
                                fd=fd,
                            )
    return PropertyResult(
        name="alpha-sensitivity-envelope",
        checks=checks,
        violations=violations,
        detail=(
            "commission-free branded deflator slope dominates third-party at "
            "tested commissions; envelope vs finite difference rel err <= 1e-4"
        ),
        counterexample=example,
    )


def _prop_olg_unique(pool: list[ModelParams], d_max: float) -> PropertyResult:
    """Exhaustive steady-state audit: one survivor, the trade pattern, with
    prices matching the two-period second-period formulas to 1e-12."""

    checks = violations = 0
    example = None
    for params in pool:
        for regime in (Regime.THIRD_PARTY, Regime.BRANDED):
            sol = olg_mod.solve_olg(params, regime, d_max=d_max)
            scan = oracle_mod.exhaustive_steady_state_scan(params, sol.D_star)
            pr = tp.prices(params, sol.D_star)
            checks += 1
            ok = (
                scan.unique_survivor_is_trade_pattern
                and abs(scan.p_n - pr.p2n) <= 1e-12
                and abs(scan.p_u - pr.p2u) <= 1e-12
            )
            if not ok:
                violations += 1
                if example is None:
                    example = _params_payload(
                        params,
                        regime=regime.value,
                        D=sol.D_star,
                        survivors=len(scan.survivors),
                    )
    return PropertyResult(
        name="olg-steady-state-uniqueness",
        checks=checks,
        violations=violations,
        detail="243 candidate (state, profile) pairs audited per draw per regime",
        counterexample=example,
    )


def _prop_constraints(
    pool_tp: list[ModelParams],
    pool_olg: list[ModelParams],
    pool_any: list[ModelParams],
    d_max: float,
) -> PropertyResult:
    """Binding pattern at every solved equilibrium, plus the implication
    chain and the cap equivalence at candidate prices off-equilibrium."""

    tol = 1e-9
    checks = violations = 0
    example = None

    def fail(params: ModelParams, **extra) -> None:
        nonlocal violations, example
        violations += 1
        if example is None:
            example = _params_payload(params, **extra)

    for params in pool_tp:
        for regime in (Regime.THIRD_PARTY, Regime.BRANDED):
            d_star = tp.optimal_durability(params, regime, d_max=d_max)
            slacks = tp.constraint_slacks(params, d_star)
            checks += 1
            ok = (
                abs(slacks["ic_h"]) <= tol
                and abs(slacks["ir_l"]) <= tol
                and slacks["ic_l"] >= -tol
                and slacks["ir_h"] >= -tol
                and slacks["ir_h_first"] >= -tol
            )
            if not ok:
                fail(params, model="two-period", regime=regime.value, slacks=slacks)

    for params in pool_olg:
        for regime in (Regime.THIRD_PARTY, Regime.BRANDED):
            d_star = olg_mod.solve_olg(params, regime, d_max=d_max).D_star
            slacks = olg_mod.constraint_slacks_olg(params, d_star)
            checks += 1
            ok = (
                abs(slacks["ic_h2"]) <= tol
                and abs(slacks["ir_l2"]) <= tol
                and slacks["ic_h1"] >= -tol
                and slacks["ic_l1"] >= -tol
                and slacks["ic_l2"] >= -tol
            )
            if not ok:
                fail(params, model="olg", regime=regime.value, slacks=slacks)

    probe_ds = (0.05, 0.3, 1.0)
    for params in pool_any:
        for d in probe_ds:
            slacks = olg_mod.constraint_slacks_olg(params, d)
            checks += 1
            ok = True
            # old-high indifference implies the young-high acceptance
            if slacks["ic_h2"] >= -tol and slacks["ic_h1"] < -tol:
                ok = False
            # young-low acceptance implies the old-low acceptance
            if slacks["ic_l1"] >= -tol and slacks["ic_l2"] < -tol:
                ok = False
            # the valuation-ratio cap is the closed form of the young-low test
            agree = (slacks["ratio_cap"] >= -tol) == (slacks["ic_l1"] >= -tol)
            if not agree and abs(slacks["ic_l1"]) > tol and abs(slacks["ratio_cap"]) > tol:
                ok = False
            if not ok:
                fail(params, D=d, slacks=slacks)
    return PropertyResult(
        name="constraint-structure",
        checks=checks,
        violations=violations,
        detail=(
            "old-high self-selection and old-low participation bind to 1e-9, "
            "all other slacks weakly positive; implication chain and cap "
            "equivalence checked at off-equilibrium durabilities"
        ),
        counterexample=example,
    )


def _prop_efficiency(pool: list[ModelParams], d_max: float) -> PropertyResult:
    """Durability and welfare orderings: third-party below branded below the
    social benchmark, pointwise in every both-active draw."""

    checks = violations = 0
    example = None
    for params in pool:
        d_t = tp.optimal_durability(params, Regime.THIRD_PARTY, d_max=d_max)
        d_b = tp.optimal_durability(params, Regime.BRANDED, d_max=d_max)
        d_s = tp.social_optimal_durability(params, d_max=d_max)
        w_t = tp.welfare(params, d_t)
        w_b = tp.welfare(params, d_b)
        w_s = tp.welfare(params, d_s)
        checks += 1
        if not (d_t < d_b < d_s and w_t < w_b < w_s):
            violations += 1
            if example is None:
                example = _params_payload(
                    params, D=(d_t, d_b, d_s), welfare=(w_t, w_b, w_s)
                )
    return PropertyResult(
        name="efficiency-ordering",
        checks=checks,
        violations=violations,
        detail="D*_T < D*_B < D_social and matching welfare ordering per draw",
        counterexample=example,
    )


def _prop_injected_failure() -> PropertyResult:
    """Deliberately failing probe proving the harness reports failures."""

    from .primitives import canonical_params, params_to_dict

    return PropertyResult(
        name="injected-failure-probe",
        checks=1,
        violations=1,
        detail="self-test probe: always fails by construction",
        counterexample={"params": params_to_dict(canonical_params())},
    )


PROPERTY_NAMES = (
    "foc-grid-agreement",
    "canonical-regression",
    "alpha-beta-ladders",
    "branded-durability-premium",
    "commission-argmax-zero",
    "alpha-sensitivity-envelope",
    "olg-steady-state-uniqueness",
    "constraint-structure",
    "efficiency-ordering",
)


_PROPERTY_DISPATCH: dict[str, Callable[..., PropertyResult]] = {
    "foc-grid-agreement": _prop_foc_grid,
    "canonical-regression": _prop_canonical,
    "alpha-beta-ladders": _prop_ladders,
    "branded-durability-premium": _prop_durability_premium,
    "commission-argmax-zero": _prop_commission_argmax,
    "alpha-sensitivity-envelope": _prop_alpha_envelope,
    "olg-steady-state-uniqueness": _prop_olg_unique,
    "constraint-structure": _prop_constraints,
    "efficiency-ordering": _prop_efficiency,
}


def _build_tasks(
    seed: int,
    foc_draws: int,
    grid_points: int,
    pool_draws: int,
    audit_draws: int,
    commission_points: int,
    d_max: float,
) -> list[tuple[str, tuple]]:
    """Draw every pool once and bind each property to picklable arguments."""

    foc_pools = {
        (model, regime): foc_pool(foc_draws, seed, model, regime)
        for model in ModelKind
        for regime in Regime
    }
    pool_tp = two_period_pool(pool_draws, seed, d_max)
    pool_olg = olg_pool(pool_draws, seed, d_max)
    pool_audit = pool_olg[:audit_draws]
    pool_any = admissible_olg_pool(audit_draws, seed)
    pool_tp_small = pool_tp[:audit_draws]

    return [
        ("foc-grid-agreement", (foc_pools, grid_points, d_max)),
        ("canonical-regression", (grid_points, d_max)),
        ("alpha-beta-ladders", (pool_tp, d_max)),
        ("branded-durability-premium", (pool_tp, pool_olg, d_max)),
        ("commission-argmax-zero", (pool_tp, pool_olg, commission_points, d_max)),
        ("alpha-sensitivity-envelope", (pool_tp, pool_olg, d_max)),
        ("olg-steady-state-uniqueness", (pool_audit, d_max)),
        ("constraint-structure", (pool_tp_small, pool_audit, pool_any, d_max)),
        ("efficiency-ordering", (pool_tp, d_max)),
    ]


def _run_task(task: tuple[str, tuple]) -> PropertyResult:
    name, args = task
    return _PROPERTY_DISPATCH[name](*args)


def run_verification(
    seed: int = 42,
    foc_draws: int = 200,
    grid_points: int = 100_000,
    pool_draws: int = 200,
    audit_draws: int = 50,
    commission_points: int = 1001,
    d_max: float = DEFAULT_D_MAX,
    jobs: int = 1,
    inject_failure: bool = False,
) -> list[PropertyResult]:
    """Run the full property suite and return one result per property.

    Deterministic for a fixed seed and scales: draw pools derive from the
    seed alone, and results are assembled in the fixed property order no
    matter how many workers run. ``inject_failure`` appends a deliberately
    failing probe so callers can confirm failures are surfaced.
    """

    tasks = _build_tasks(
        seed, foc_draws, grid_points, pool_draws, audit_draws,
        commission_points, d_max,
    )
    if jobs > 1:
        import concurrent.futures as cf

        with cf.ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(task) for task in tasks]
    if inject_failure:
        results.append(_prop_injected_failure())
    return results

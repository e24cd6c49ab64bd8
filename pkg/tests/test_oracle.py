import dataclasses

import numpy as np
import pytest

from recommerce import (
    Action,
    GridSpec,
    ModelKind,
    OlgState,
    Regime,
    STEADY_TRADE_PROFILE,
    best_response_audit,
    discounted_stream,
    exhaustive_steady_state_scan,
    grid_argmax_profit,
    objective_value,
    per_period_profit,
    profit_total,
    solve,
    solve_olg,
    steady_state_prices,
    truncated_stream,
    truncated_stream_error_bound,
)
from recommerce.oracle import action_value

T = Regime.THIRD_PARTY
B = Regime.BRANDED


# ----------------------------------------------------------------------
# grid search
# ----------------------------------------------------------------------


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(count=1)
    with pytest.raises(ValueError):
        GridSpec(lower=1.0, upper=1.0)
    with pytest.raises(ValueError):
        GridSpec(lower=2.0, upper=1.0, count=10)


def test_grid_spec_step():
    g = GridSpec(lower=0.0, upper=10.0, count=101)
    assert g.step == pytest.approx(0.1)
    pts = g.points()
    assert pts[0] == 0.0 and pts[-1] == 10.0
    assert len(pts) == 101


@pytest.mark.parametrize("regime", [T, B])
def test_grid_matches_first_order_solution_two_period(canonical, regime):
    sol = solve(canonical, regime)
    res = grid_argmax_profit(
        canonical, regime, ModelKind.TWO_PERIOD, GridSpec(count=100_000)
    )
    assert abs(res.D_at_max - sol.D_star) <= res.step
    assert res.value == pytest.approx(sol.profit_total, abs=1e-6)


@pytest.mark.parametrize("regime", [T, B])
def test_grid_matches_first_order_solution_olg(olg_feasible, regime):
    sol = solve_olg(olg_feasible, regime)
    res = grid_argmax_profit(
        olg_feasible, regime, ModelKind.OLG, GridSpec(count=100_000)
    )
    assert abs(res.D_at_max - sol.D_star) <= res.step
    assert res.value == pytest.approx(sol.objective_value, abs=1e-6)


def test_grid_shutdown_pins_zero(canonical):
    # negative margins push the argmax to the zero-durability corner
    weak = dataclasses.replace(canonical, v_L=0.4)
    for model in (ModelKind.TWO_PERIOD, ModelKind.OLG):
        res = grid_argmax_profit(weak, T, model, GridSpec(count=5_000))
        assert res.index == 0
        assert res.D_at_max == 0.0


def test_grid_stream_only_olg_pins_zero(olg_feasible):
    res = grid_argmax_profit(
        olg_feasible,
        B,
        ModelKind.OLG,
        GridSpec(count=5_000),
        include_entry_premium=False,
    )
    assert res.index == 0


@pytest.mark.parametrize(
    "model,objective",
    [
        (ModelKind.TWO_PERIOD, profit_total),
        (ModelKind.OLG, objective_value),
    ],
)
def test_objective_single_peaked_on_grid(canonical, olg_feasible, model, objective):
    params = canonical if model is ModelKind.TWO_PERIOD else olg_feasible
    ds = np.linspace(0.0, 2.0, 401)
    vals = np.array([objective(params, B, float(d)) for d in ds])
    k = int(np.argmax(vals))
    diffs = np.diff(vals)
    assert np.all(diffs[:k] > 0)
    assert np.all(diffs[k:] < 0)


# ----------------------------------------------------------------------
# truncated stream cross-check
# ----------------------------------------------------------------------


def test_one_period_truncation(canonical):
    for regime in (T, B):
        got = truncated_stream(canonical, regime, 0.3, horizon=1)
        want = canonical.delta * per_period_profit(canonical, regime, 0.3)
        assert got == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("delta,horizon", [(0.5, 50), (0.9, 500)])
def test_truncation_error_within_bound(canonical, delta, horizon):
    p = dataclasses.replace(canonical, delta=delta)
    for regime in (T, B):
        closed = discounted_stream(p, regime, 0.4)
        trunc = truncated_stream(p, regime, 0.4, horizon=horizon)
        bound = truncated_stream_error_bound(p, horizon)
        assert abs(trunc - closed) <= bound * abs(closed)


def test_error_bound_decays_with_horizon(canonical):
    b10 = truncated_stream_error_bound(canonical, 10)
    b100 = truncated_stream_error_bound(canonical, 100)
    assert b100 < b10
    assert b100 > 0.0


# ----------------------------------------------------------------------
# action valuations
# ----------------------------------------------------------------------


def test_action_values_match_closed_forms(canonical):
    p = canonical
    d = 0.12
    s = p.quality.value(d)
    p_n, p_u = steady_state_prices(p, d)
    st = OlgState.HIGH_ONLY

    def val(cell, action):
        return action_value(p, d, p_n, p_u, st, cell, action)

    # old high owner
    assert val("h2", Action.SELL_AND_BUY_NEW) == p.v_H - p_n + (1 - p.beta) * p_u
    assert val("h2", Action.KEEP_USED) == p.v_H * s
    assert val("h2", Action.DO_NOTHING) == 0.0
    # old low, no unit to sell: buying used is valued with the deflator
    assert val("l2", Action.BUY_USED) == p.alpha * p.v_L * s - p_u
    assert val("l2", Action.BUY_NEW) == p.v_L - p_n
    # young high carries the better continuation into old age
    cont = max(p.v_H - p_n + (1 - p.beta) * p_u, p.v_H * s)
    assert val("h1", Action.BUY_NEW) == p.v_H - p_n + p.delta * cont
    # young high values a used unit at full quality, no deflator
    assert val("h1", Action.BUY_USED) == p.v_H * s - p_u
    # young low
    cont_l = max(p.v_L - p_n + (1 - p.beta) * p_u, p.v_L * s)
    assert val("l1", Action.BUY_NEW) == p.v_L - p_n + p.delta * cont_l
    assert val("l1", Action.BUY_USED) == p.alpha * p.v_L * s - p_u


def test_old_low_used_purchase_breaks_even(canonical):
    # the posted used price extracts the old low cohort's full surplus
    d = 0.12
    p_n, p_u = steady_state_prices(canonical, d)
    got = action_value(
        canonical, d, p_n, p_u, OlgState.HIGH_ONLY, "l2", Action.BUY_USED
    )
    assert got == 0.0


def test_owner_actions_degrade_for_young_cells(canonical):
    # in the saturated state young cells face owner menus with nothing to sell
    d = 0.12
    p_n, p_u = steady_state_prices(canonical, d)
    sell = action_value(
        canonical, d, p_n, p_u, OlgState.ALL, "l1", Action.SELL_AND_BUY_NEW
    )
    buy = action_value(canonical, d, p_n, p_u, OlgState.ALL, "l1", Action.BUY_NEW)
    assert sell == buy
    keep = action_value(
        canonical, d, p_n, p_u, OlgState.HIGH_ONLY, "l1", Action.KEEP_USED
    )
    assert keep == 0.0


# ----------------------------------------------------------------------
# best-response audit
# ----------------------------------------------------------------------


def test_trade_profile_audit_passes(canonical):
    rep = best_response_audit(canonical, 0.12, OlgState.HIGH_ONLY, STEADY_TRADE_PROFILE)
    assert rep.all_attain
    assert rep.all_selected
    assert {c.cell for c in rep.cells} == {"h1", "h2", "l1", "l2"}


def test_indifferent_keeper_attains_but_not_selected(canonical):
    # at candidate prices old highs are exactly indifferent; the tie-break
    # sends the unit to the used market
    keepers = dataclasses.replace(STEADY_TRADE_PROFILE, h2=Action.KEEP_USED)
    rep = best_response_audit(canonical, 0.12, OlgState.HIGH_ONLY, keepers)
    h2 = next(c for c in rep.cells if c.cell == "h2")
    assert h2.attains_max
    assert not h2.is_selected
    assert h2.selected is Action.SELL_AND_BUY_NEW
    assert not rep.all_selected


def test_bad_action_fails_attainment(canonical):
    clunker = dataclasses.replace(STEADY_TRADE_PROFILE, l2=Action.BUY_NEW)
    rep = best_response_audit(canonical, 0.12, OlgState.HIGH_ONLY, clunker)
    l2 = next(c for c in rep.cells if c.cell == "l2")
    assert not l2.attains_max
    assert l2.prescribed_value < l2.best_value
    assert not rep.all_attain


def test_audit_honors_price_overrides(canonical):
    # a discounted used price hands the old low cohort strict surplus
    d = 0.12
    p_n, p_u = steady_state_prices(canonical, d)
    rep = best_response_audit(
        canonical, d, OlgState.HIGH_ONLY, STEADY_TRADE_PROFILE,
        p_n=p_n, p_u=p_u - 0.01,
    )
    l2 = next(c for c in rep.cells if c.cell == "l2")
    assert l2.prescribed_value == pytest.approx(0.01)
    assert l2.is_selected


# ----------------------------------------------------------------------
# exhaustive scan
# ----------------------------------------------------------------------


def test_scan_is_exhaustive(canonical):
    res = exhaustive_steady_state_scan(canonical, 0.12)
    assert len(res.rows) == 3 * 81
    p_n, p_u = steady_state_prices(canonical, 0.12)
    assert res.p_n == p_n and res.p_u == p_u


def test_scan_unique_survivor_at_canonical(canonical):
    res = exhaustive_steady_state_scan(canonical, 0.12)
    assert res.unique_survivor_is_trade_pattern
    (row,) = res.survivors
    assert row.state is OlgState.HIGH_ONLY
    assert row.profile == STEADY_TRADE_PROFILE


def test_scan_has_no_survivor_when_cap_fails(cap_failure):
    d = solve_olg(cap_failure, T).D_star
    res = exhaustive_steady_state_scan(cap_failure, d)
    assert len(res.survivors) == 0
    assert not res.unique_survivor_is_trade_pattern

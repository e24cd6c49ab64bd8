"""Durability choice for a durable-goods seller facing a pre-owned market.

Solves the two-period and overlapping-generations steady-state problems
under two resale regimes (third-party marketplace vs seller-run program),
computes prices, profit decompositions, welfare, and comparative statics,
and cross-checks every analytic optimum against a brute-force grid oracle.
"""

from .primitives import (
    DEFAULT_D_MAX,
    BracketError,
    ModelKind,
    ModelParams,
    PowerCost,
    RationalQuality,
    Regime,
    SaturatingExpQuality,
    ValidationReport,
    bisect_increasing,
    canonical_params,
    params_from_dict,
    params_to_dict,
    validate_params,
)
from .two_period import (
    MarketMode,
    Prices,
    ProfitBreakdown,
    TwoPeriodEquilibrium,
    activity_margin,
    activity_threshold,
    constraint_slacks,
    market_mode,
    optimal_durability,
    prices,
    profit,
    profit_total,
    shutdown_profit,
    social_optimal_durability,
    solve,
    welfare,
)
from .olg import (
    Action,
    ActionProfile,
    OlgState,
    STEADY_TRADE_PROFILE,
    SteadyStateSolution,
    check_steady_state,
    constraint_slacks_olg,
    discounted_stream,
    enumerate_profiles,
    objective_value,
    olg_margin,
    per_period_profit,
    solve_olg,
    steady_state_prices,
)
from .oracle import (
    GridSpec,
    best_response_audit,
    exhaustive_steady_state_scan,
    grid_argmax_profit,
    truncated_stream,
    truncated_stream_error_bound,
)
from .statics import (
    CommissionCurve,
    ComparativeReport,
    RegimeComparison,
    envelope_dpi_dalpha,
    envelope_dpi_dbeta,
    envelope_profit_derivative,
    fd_profit_derivative,
    monotonicity_sweep,
    optimal_commission,
    regime_comparison,
    run_verification,
    sample_params,
    value_function,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_D_MAX",
    "BracketError",
    "ModelKind",
    "ModelParams",
    "PowerCost",
    "RationalQuality",
    "Regime",
    "SaturatingExpQuality",
    "ValidationReport",
    "bisect_increasing",
    "canonical_params",
    "params_from_dict",
    "params_to_dict",
    "validate_params",
    "MarketMode",
    "Prices",
    "ProfitBreakdown",
    "TwoPeriodEquilibrium",
    "activity_margin",
    "activity_threshold",
    "constraint_slacks",
    "market_mode",
    "optimal_durability",
    "prices",
    "profit",
    "profit_total",
    "shutdown_profit",
    "social_optimal_durability",
    "solve",
    "welfare",
    "Action",
    "ActionProfile",
    "OlgState",
    "STEADY_TRADE_PROFILE",
    "SteadyStateSolution",
    "check_steady_state",
    "constraint_slacks_olg",
    "discounted_stream",
    "enumerate_profiles",
    "objective_value",
    "olg_margin",
    "per_period_profit",
    "solve_olg",
    "steady_state_prices",
    "GridSpec",
    "best_response_audit",
    "exhaustive_steady_state_scan",
    "grid_argmax_profit",
    "truncated_stream",
    "truncated_stream_error_bound",
    "CommissionCurve",
    "ComparativeReport",
    "RegimeComparison",
    "envelope_dpi_dalpha",
    "envelope_dpi_dbeta",
    "envelope_profit_derivative",
    "fd_profit_derivative",
    "monotonicity_sweep",
    "optimal_commission",
    "regime_comparison",
    "run_verification",
    "sample_params",
    "value_function",
    "__version__",
]

"""Parameter containers, function families, and shared numeric guards.

Everything downstream (the two-period solver, the overlapping-generations
solver, the comparative-statics engine, the brute-force oracle, the CLI)
consumes the types defined here. All containers are immutable; constructing
one never runs the full admissibility checks, which live in
:func:`validate_params` so that finite-difference probes may briefly step
outside the admissible box.

Durability enters through two one-dimensional function families:

* a production cost ``c(D)`` with ``c(0)=0``, ``c'(0)=0``, ``c'>0``, ``c''>0``,
* a resale quality ``s(D)`` with ``s(0)=0``, ``0 <= s(D) < 1``, ``s'>0``, ``s''<0``.

Each family carries exact closed forms for its value and first two
derivatives; numeric spot checks in :func:`validate_params` guard against a
mistyped derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Union

import numpy as np

__all__ = [
    "DEFAULT_D_MAX",
    "Regime",
    "ModelKind",
    "PowerCost",
    "SaturatingExpQuality",
    "RationalQuality",
    "CostFn",
    "QualityFn",
    "ModelParams",
    "Check",
    "ValidationReport",
    "validate_params",
    "canonical_params",
    "params_from_dict",
    "params_to_dict",
    "bisect_increasing",
    "bisect_increasing_vec",
    "BracketError",
]

# Upper end of every durability search. Admissible cost families grow fast
# enough that optimal durability sits far inside this bound.
DEFAULT_D_MAX = 10.0


class Regime(str, Enum):
    """Who operates the pre-owned marketplace."""

    THIRD_PARTY = "third-party"
    BRANDED = "branded"


class ModelKind(str, Enum):
    """Market horizon: the two-period model or the stationary OLG model."""

    TWO_PERIOD = "two-period"
    OLG = "olg"


# ======================================================================
# function families
# ======================================================================


def _as_array(D) -> tuple[np.ndarray, bool]:
    arr = np.asarray(D, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("durability must be nonnegative")
    return arr, arr.ndim == 0


def _maybe_scalar(out: np.ndarray, scalar: bool):
    return float(out) if scalar else out


@dataclass(frozen=True)
class PowerCost:
    """Production cost ``c(D) = c0 * D**p`` with ``p > 1``.

    Args:
        c0: positive scale.
        p: exponent, strictly above 1 so that ``c'(0) = 0``.
    """

    c0: float
    p: float

    def __post_init__(self) -> None:
        if not self.c0 > 0.0:
            raise ValueError("PowerCost: c0 must be positive")
        if not self.p > 1.0:
            raise ValueError("PowerCost: exponent must exceed 1")

    def value(self, D):
        arr, scalar = _as_array(D)
        return _maybe_scalar(self.c0 * arr**self.p, scalar)

    def deriv(self, D):
        arr, scalar = _as_array(D)
        return _maybe_scalar(self.c0 * self.p * arr ** (self.p - 1.0), scalar)

    def deriv2(self, D):
        arr, scalar = _as_array(D)
        coef = self.c0 * self.p * (self.p - 1.0)
        if self.p >= 2.0:
            out = coef * arr ** (self.p - 2.0)
        else:
            # D**(p-2) diverges at the origin for 1 < p < 2
            with np.errstate(divide="ignore"):
                out = np.where(arr > 0.0, coef * arr ** (self.p - 2.0), np.inf)
        return _maybe_scalar(out, scalar)

    def eval_triple(self, D):
        return self.value(D), self.deriv(D), self.deriv2(D)


@dataclass(frozen=True)
class SaturatingExpQuality:
    """Resale quality ``s(D) = s_bar * (1 - exp(-k D))``.

    Args:
        s_bar: saturation level in (0, 1].
        k: positive rate.
    """

    s_bar: float
    k: float

    def __post_init__(self) -> None:
        if not 0.0 < self.s_bar <= 1.0:
            raise ValueError("SaturatingExpQuality: s_bar must lie in (0, 1]")
        if not self.k > 0.0:
            raise ValueError("SaturatingExpQuality: k must be positive")

    def value(self, D):
        arr, scalar = _as_array(D)
        return _maybe_scalar(self.s_bar * (1.0 - np.exp(-self.k * arr)), scalar)

    def deriv(self, D):
        arr, scalar = _as_array(D)
        return _maybe_scalar(self.s_bar * self.k * np.exp(-self.k * arr), scalar)

    def deriv2(self, D):
        arr, scalar = _as_array(D)
        return _maybe_scalar(-self.s_bar * self.k**2 * np.exp(-self.k * arr), scalar)

    def eval_triple(self, D):
        return self.value(D), self.deriv(D), self.deriv2(D)


@dataclass(frozen=True)
class RationalQuality:
    """Resale quality ``s(D) = D / (D + k)`` with ``k > 0``."""

    k: float

    def __post_init__(self) -> None:
        if not self.k > 0.0:
            raise ValueError("RationalQuality: k must be positive")

    def value(self, D):
        arr, scalar = _as_array(D)
        return _maybe_scalar(arr / (arr + self.k), scalar)

    def deriv(self, D):
        arr, scalar = _as_array(D)
        return _maybe_scalar(self.k / (arr + self.k) ** 2, scalar)

    def deriv2(self, D):
        arr, scalar = _as_array(D)
        return _maybe_scalar(-2.0 * self.k / (arr + self.k) ** 3, scalar)

    def eval_triple(self, D):
        return self.value(D), self.deriv(D), self.deriv2(D)


CostFn = PowerCost
QualityFn = Union[SaturatingExpQuality, RationalQuality]


# ======================================================================
# parameters
# ======================================================================


@dataclass(frozen=True)
class ModelParams:
    """Primitive parameters shared by both market models.

    Attributes:
        v_H: valuation of the high type, strictly above v_L.
        v_L: valuation of the low type, strictly positive.
        n_H: mass of high-type customers (per cohort in the OLG model).
        n_L: mass of low-type customers.
        delta: common discount factor in (0, 1).
        alpha: quality-uncertainty deflator applied to used-good buyers, (0, 1].
        beta: marketplace commission charged on used-good sales, [0, 1).
        cost: production cost family.
        quality: resale quality family.
    """

    v_H: float
    v_L: float
    n_H: float
    n_L: float
    delta: float
    alpha: float
    beta: float
    cost: CostFn
    quality: QualityFn


def canonical_params() -> ModelParams:
    """The worked example used throughout the docs and regression tests."""

    return ModelParams(
        v_H=1.0,
        v_L=0.8,
        n_H=0.3,
        n_L=0.7,
        delta=0.9,
        alpha=0.9,
        beta=0.2,
        cost=PowerCost(c0=0.5, p=2.0),
        quality=SaturatingExpQuality(s_bar=1.0, k=1.0),
    )


# ======================================================================
# validation
# ======================================================================


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the admissibility checks for one (params, model) pair."""

    model: ModelKind
    checks: tuple[Check, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def validate_params(
    params: ModelParams,
    model: ModelKind = ModelKind.TWO_PERIOD,
    d_max: float = DEFAULT_D_MAX,
) -> ValidationReport:
    """Run every admissibility check and report them individually.

    Scalar range checks are exact; the shape restrictions on the cost and
    quality families are verified both at zero and on a 100-point grid of
    [0, d_max], together with strict monotonicity of the ratio c'/s' that
    makes the durability first-order condition single-crossing.
    """

    p = params
    checks: list[Check] = []

    def add(name: str, passed: bool, detail: str = "") -> None:
        checks.append(Check(name, bool(passed), detail))

    add("valuations_ordered", p.v_H > p.v_L > 0.0, f"v_H={p.v_H}, v_L={p.v_L}")
    add("shares_positive", p.n_H > 0.0 and p.n_L > 0.0, f"n_H={p.n_H}, n_L={p.n_L}")
    add("discount_in_unit_interval", 0.0 < p.delta < 1.0, f"delta={p.delta}")
    add("deflator_in_range", 0.0 < p.alpha <= 1.0, f"alpha={p.alpha}")
    add("commission_in_range", 0.0 <= p.beta < 1.0, f"beta={p.beta}")

    grid = np.linspace(0.0, d_max, 100)
    pos = grid[1:]

    cv, cd, cdd = p.cost.eval_triple(grid)
    add("cost_zero_at_origin", cv[0] == 0.0 and cd[0] == 0.0)
    add("cost_strictly_increasing", bool(np.all(cd[1:] > 0.0)))
    add("cost_strictly_convex", bool(np.all(p.cost.deriv2(pos) > 0.0)))

    sv, sd, sdd = p.quality.eval_triple(grid)
    add("quality_zero_at_origin", sv[0] == 0.0)
    add("quality_below_one", bool(np.all(sv < 1.0)))
    add("quality_strictly_increasing", bool(np.all(sd > 0.0)))
    add("quality_strictly_concave", bool(np.all(sdd < 0.0)))

    ratio = cd / sd
    add(
        "foc_single_crossing",
        bool(np.all(np.diff(ratio) > 0.0)),
        "c'/s' must increase strictly",
    )

    if model is ModelKind.TWO_PERIOD:
        add("low_share_exceeds_high", p.n_L > p.n_H, f"n_L={p.n_L}, n_H={p.n_H}")
    else:
        add(
            "cohort_shares_sum_to_one",
            abs(p.n_H + p.n_L - 1.0) <= 1e-12,
            f"n_H+n_L={p.n_H + p.n_L}",
        )
        add("used_demand_covers_supply", 2.0 * p.n_L > p.n_H)

    return ValidationReport(model=model, checks=tuple(checks))


# ======================================================================
# config ingestion
# ======================================================================

_COST_FAMILIES = {"power": PowerCost}
_QUALITY_FAMILIES = {
    "saturating_exp": SaturatingExpQuality,
    "rational": RationalQuality,
}
_FAMILY_FIELDS = {
    PowerCost: ("c0", "p"),
    SaturatingExpQuality: ("s_bar", "k"),
    RationalQuality: ("k",),
}


def _family_from_dict(payload: dict, registry: dict, label: str):
    if not isinstance(payload, dict):
        raise ValueError(f"{label}: expected an object with a 'family' key")
    data = dict(payload)
    family = data.pop("family", None)
    if family not in registry:
        raise ValueError(
            f"{label}: unknown family {family!r}; expected one of {sorted(registry)}"
        )
    cls = registry[family]
    expected = set(_FAMILY_FIELDS[cls])
    unknown = set(data) - expected
    if unknown:
        raise ValueError(f"{label}: unknown keys {sorted(unknown)}")
    missing = expected - set(data)
    if missing:
        raise ValueError(f"{label}: missing keys {sorted(missing)}")
    return cls(**{k: float(v) for k, v in data.items()})


_SCALAR_FIELDS = ("v_H", "v_L", "n_H", "n_L", "delta", "alpha", "beta")


def params_from_dict(payload: dict) -> ModelParams:
    """Build :class:`ModelParams` from a parsed config mapping.

    Unknown keys are rejected rather than ignored so that typos fail loudly.
    """

    if not isinstance(payload, dict):
        raise ValueError("params: expected an object")
    data = dict(payload)
    cost = _family_from_dict(data.pop("cost", None), _COST_FAMILIES, "params.cost")
    quality = _family_from_dict(
        data.pop("quality", None), _QUALITY_FAMILIES, "params.quality"
    )
    unknown = set(data) - set(_SCALAR_FIELDS)
    if unknown:
        raise ValueError(f"params: unknown keys {sorted(unknown)}")
    missing = set(_SCALAR_FIELDS) - set(data)
    if missing:
        raise ValueError(f"params: missing keys {sorted(missing)}")
    scalars = {k: float(data[k]) for k in _SCALAR_FIELDS}
    return ModelParams(cost=cost, quality=quality, **scalars)


def params_to_dict(params: ModelParams) -> dict:
    """Inverse of :func:`params_from_dict` (round-trips exactly)."""

    def family_payload(fn) -> dict:
        for name, cls in {**_COST_FAMILIES, **_QUALITY_FAMILIES}.items():
            if type(fn) is cls:
                out = {"family": name}
                out.update({f: getattr(fn, f) for f in _FAMILY_FIELDS[cls]})
                return out
        raise ValueError(f"unregistered function family {type(fn)!r}")

    out = {k: getattr(params, k) for k in _SCALAR_FIELDS}
    out["cost"] = family_payload(params.cost)
    out["quality"] = family_payload(params.quality)
    return out


# ======================================================================
# root finding
# ======================================================================


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


def bisect_increasing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 1e-10,
) -> float:
    """Bisection root of an increasing function with f(lo) < 0 < f(hi).

    This plain bisection is the canonical root-finder for every first-order
    condition in the package; tests freeze its output, so the iteration is
    deliberately simple and deterministic.
    """

    flo = f(lo)
    fhi = f(hi)
    if flo >= 0.0:
        if flo == 0.0:
            return lo
        raise BracketError(f"f({lo}) = {flo} is not negative")
    if fhi <= 0.0:
        if fhi == 0.0:
            return hi
        raise BracketError(f"f({hi}) = {fhi} is not positive")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval no longer splittable
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_increasing_vec(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    n: int,
    xtol: float = 1e-10,
) -> np.ndarray:
    """Vectorized counterpart of :func:`bisect_increasing`.

    Runs ``n`` independent bisections that share the bracket [lo, hi]; ``f``
    maps an array of midpoints to an array of residuals. The arithmetic per
    lane matches the scalar routine exactly (same bracket, same midpoint
    sequence), so mixed scalar/vector use cannot drift.
    """

    los = np.full(n, lo, dtype=float)
    his = np.full(n, hi, dtype=float)
    while True:
        mids = 0.5 * (los + his)
        active = (his - los > xtol) & (mids > los) & (mids < his)
        if not np.any(active):
            break
        vals = f(mids)
        neg = vals < 0.0
        los = np.where(active & neg, mids, los)
        his = np.where(active & ~neg, mids, his)
    return 0.5 * (los + his)

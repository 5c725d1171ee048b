"""Iron Condor construction and valuation.

A condor is short the put spread (long put k1, short put k2) and short the
call spread (short call k3, long call k4), collecting a net entry credit.
The cost to close at time t is

    P_t = (V_put(k2) - V_put(k1)) + (V_call(k3) - V_call(k4)),

so profit = credit - P_t.  Strikes may come directly from the lattice or
from the (x, xhat, xbar) parameterization: moneyness, spread span, and
asymmetry (S0 - k1) - (k4 - S0).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NonpositiveCredit, StrikeOrderViolation
from .pricer import PricingGrid, _intrinsic
from .roughheston import PathBundle

MIN_CREDIT = 1e-8


@dataclass(frozen=True)
class CondorSpec:
    k1: float
    k2: float
    k3: float
    k4: float
    credit: float
    params: dict | None = None

    def __post_init__(self):
        _check_order(self.k1, self.k2, self.k3, self.k4)


@dataclass
class ValueTensor:
    """The dataset array D[n][t][f]: underlying at f = 0, portfolios at f >= 1."""

    d: np.ndarray
    portfolio_specs: list = field(default_factory=list)


def _check_order(k1, k2, k3, k4):
    if not (k1 < k2 <= k3 < k4):
        raise StrikeOrderViolation(
            f"strikes must satisfy k1 < k2 <= k3 < k4, got ({k1}, {k2}, {k3}, {k4})"
        )


def from_params(x: float, xhat: float, xbar: float, s0: float = 1.0):
    """Strikes (k1, k2, k3, k4) from moneyness / span / asymmetry.

    Symmetric base k2 = s0(1-x), k3 = s0(1+x) with spread width xhat*s0 on
    both wings; positive xbar shifts the put pair down, negative xbar
    shifts the call pair up, so (S0 - k1) - (k4 - S0) = xbar * s0.
    """
    if x < 0:
        raise ValueError("moneyness x must be nonnegative")
    if xhat <= 0:
        raise ValueError("span xhat must be positive")
    k2 = s0 * (1.0 - x)
    k3 = s0 * (1.0 + x)
    k1 = k2 - s0 * xhat
    k4 = k3 + s0 * xhat
    if xbar > 0:
        k1 -= s0 * xbar
        k2 -= s0 * xbar
    elif xbar < 0:
        k3 -= s0 * xbar
        k4 -= s0 * xbar
    _check_order(k1, k2, k3, k4)
    return k1, k2, k3, k4


def params_of(k1, k2, k3, k4, s0: float = 1.0):
    """Recover (x, xhat, xbar) from strikes via the defining formulas."""
    return (abs(k2 - s0) / s0, (k2 - k1) / s0, ((s0 - k1) - (k4 - s0)) / s0)


def from_strikes(
    k1: float,
    k2: float,
    k3: float,
    k4: float,
    grid: PricingGrid,
    path: int = 0,
    step: int = 0,
    params: dict | None = None,
) -> CondorSpec:
    """Build a spec with entry credit taken from the pricing grid."""
    _check_order(k1, k2, k3, k4)
    v = grid.values[path, step]
    call, put = PricingGrid.KIND_INDEX["call"], PricingGrid.KIND_INDEX["put"]
    credit = (
        v[grid.strike_index(k2), put]
        - v[grid.strike_index(k1), put]
        + v[grid.strike_index(k3), call]
        - v[grid.strike_index(k4), call]
    )
    if credit <= MIN_CREDIT:
        raise NonpositiveCredit(f"entry credit {credit:.3e} below threshold {MIN_CREDIT}")
    return CondorSpec(k1, k2, k3, k4, float(credit), params)


def value_process(spec: CondorSpec, grid: PricingGrid) -> np.ndarray:
    """Portfolio cost-to-close P_t per (path, step)."""
    return (
        grid.leg_values("put", spec.k2)
        - grid.leg_values("put", spec.k1)
        + grid.leg_values("call", spec.k3)
        - grid.leg_values("call", spec.k4)
    )


def terminal_payoff(spec: CondorSpec, s_t):
    """Profit at expiry: credit minus settlement cost of the four legs."""
    s_t = np.asarray(s_t, dtype=float)
    cost = (
        _intrinsic("put", s_t, spec.k2)
        - _intrinsic("put", s_t, spec.k1)
        + _intrinsic("call", s_t, spec.k3)
        - _intrinsic("call", s_t, spec.k4)
    )
    out = spec.credit - cost
    return out if out.ndim else float(out)


def breakevens(spec: CondorSpec):
    """Underlying levels where terminal profit crosses zero."""
    from .errors import NoBreakeven

    if spec.credit >= spec.k2 - spec.k1 or spec.credit >= spec.k4 - spec.k3:
        raise NoBreakeven(
            "credit exceeds a spread width; that side is always profitable"
        )
    return spec.k2 - spec.credit, spec.k3 + spec.credit


def build_value_tensor(bundle: PathBundle, grid: PricingGrid, specs) -> ValueTensor:
    """Assemble D[n][t][f]: slot 0 the underlying, slot f >= 1 value processes."""
    specs = list(specs)
    if not specs:
        raise ValueError("specs must be non-empty")
    n, m = bundle.n_paths, bundle.n_steps
    d = np.empty((n, m + 1, 1 + len(specs)))
    d[:, :, 0] = bundle.s
    for f, spec in enumerate(specs, start=1):
        d[:, :, f] = value_process(spec, grid)
    return ValueTensor(d=d, portfolio_specs=specs)

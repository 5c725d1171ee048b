"""European leg valuation along simulated paths.

Rough Heston is non-Markovian, so the reference pricer is nested Monte
Carlo: at each (path, step) the retained noise history seeds fresh
conditional continuations and the leg value is the mean terminal payoff
(r = 0, no discounting).  All strikes and both kinds at one (path, step)
share the same continuations (common random numbers).  A Black--Scholes
closed form is kept as the degenerate-case oracle (nu = 0).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import CapacityExceeded
from .roughheston import PathBundle, _continue_block, _innovations, continue_paths
from .rng import substream

DEFAULT_CAPACITY = 5e12
_CHUNK_TARGET = 4_000_000  # inner-noise elements per batch


@dataclass(frozen=True)
class LegQuote:
    kind: str
    strike: float
    value: float
    std_error: float


@dataclass
class PricingGrid:
    """Leg prices at every (path, step, strike, kind).

    ``values`` and ``std_errors`` have shape
    (n_paths, n_steps + 1, n_strikes, 2) with kind index 0 = call, 1 = put.
    """

    values: np.ndarray
    std_errors: np.ndarray
    strikes: np.ndarray
    n_inner: int
    seed: int

    KIND_INDEX = {"call": 0, "put": 1}

    def strike_index(self, strike: float) -> int:
        idx = np.nonzero(np.isclose(self.strikes, strike, atol=1e-9))[0]
        if len(idx) == 0:
            from .errors import StrikeNotOnGrid

            raise StrikeNotOnGrid(f"strike {strike} not on grid {self.strikes.tolist()}")
        return int(idx[0])

    def leg_values(self, kind: str, strike: float) -> np.ndarray:
        """Value matrix (n_paths, n_steps + 1) for one leg."""
        return self.values[:, :, self.strike_index(strike), self.KIND_INDEX[kind]]


def _intrinsic(kind: str, s, k):
    if kind == "call":
        return np.maximum(np.asarray(s) - k, 0.0)
    if kind == "put":
        return np.maximum(k - np.asarray(s), 0.0)
    raise ValueError(f"unknown option kind {kind!r}")


def bs_price(kind: str, s: float, k: float, sigma: float, tau_years: float, r: float = 0.0) -> float:
    """Black--Scholes price; intrinsic value at zero maturity or volatility."""
    if s <= 0 or k <= 0:
        raise ValueError("spot and strike must be positive")
    if tau_years < 0 or sigma < 0:
        raise ValueError("maturity and volatility must be nonnegative")
    if tau_years == 0:
        return float(_intrinsic(kind, s, k))
    disc = math.exp(-r * tau_years)
    if sigma == 0:
        return float(_intrinsic(kind, s, k * disc))
    vol = sigma * math.sqrt(tau_years)
    d1 = (math.log(s / k) + (r + 0.5 * sigma ** 2) * tau_years) / vol
    d2 = d1 - vol
    if kind == "call":
        return float(s * norm.cdf(d1) - k * disc * norm.cdf(d2))
    if kind == "put":
        return float(k * disc * norm.cdf(-d2) - s * norm.cdf(-d1))
    raise ValueError(f"unknown option kind {kind!r}")


def price_leg(
    bundle: PathBundle,
    path_index: int,
    step: int,
    kind: str,
    strike: float,
    n_inner: int,
    seed: int,
) -> LegQuote:
    """Nested-MC leg value at one (path, step).

    The inner stream is keyed by (seed, path_index, step), matching the
    derivation used by build_pricing_grid.
    """
    if strike <= 0:
        raise ValueError("strike must be positive")
    if step == bundle.n_steps:
        value = float(_intrinsic(kind, bundle.s[path_index, step], strike))
        return LegQuote(kind=kind, strike=strike, value=value, std_error=0.0)
    cont = continue_paths(bundle, path_index, step, n_inner, (seed, path_index, step))
    payoff = _intrinsic(kind, cont.s[:, -1], strike)
    se = float(payoff.std(ddof=1) / math.sqrt(n_inner)) if n_inner > 1 else float("inf")
    return LegQuote(kind=kind, strike=strike, value=float(payoff.mean()), std_error=se)


def _terminal_samples(bundle: PathBundle, step: int, path_slice: slice, n_inner: int, seed: int):
    """Terminal spot continuations for a block of paths at one step.

    Draws per-path inner noise from the (seed, path, step) substream in the
    same order and shape as continue_paths, so a single valuation through
    either route agrees.
    """
    params, dt = bundle.params, bundle.grid.dt
    paths = range(path_slice.start, path_slice.stop)
    rem = bundle.n_steps - step
    z = np.empty((len(range(*path_slice.indices(bundle.n_paths))), 2, n_inner, rem))
    for row, p in enumerate(paths):
        z[row] = substream(seed, p, step).standard_normal((2, n_inner, rem))
    f_out = _innovations(
        params, dt, bundle.v[path_slice, :step], bundle.dW2[path_slice, :step]
    )
    s, _, _ = _continue_block(
        params, dt, bundle.n_steps, step,
        f_out, bundle.s[path_slice, step], bundle.v[path_slice, step],
        z[:, 0], z[:, 1],
    )
    return s[:, :, -1]  # (n_block, n_inner)


def build_pricing_grid(
    bundle: PathBundle,
    strikes,
    n_inner: int,
    seed: int,
    capacity: float = DEFAULT_CAPACITY,
) -> PricingGrid:
    """Price every (path, step, strike, kind) by nested Monte Carlo.

    Inner seeds derive from (seed, path, step); the four portfolio legs at
    one valuation point share the same continuations.  At step 0 all paths
    are in the identical state, so a single valuation (keyed to path 0) is
    shared across paths; the terminal slice is exact intrinsic payoff.
    """
    strikes = np.asarray(strikes, dtype=float)
    if len(strikes) == 0 or np.any(strikes <= 0):
        raise ValueError("strikes must be positive and non-empty")
    if np.any(np.diff(strikes) < 0):
        raise ValueError("strikes must be sorted ascending")
    n, m = bundle.n_paths, bundle.n_steps
    workload = float(n) * m * len(strikes) * n_inner
    if workload > capacity:
        raise CapacityExceeded(
            f"n_paths*n_steps*n_strikes*n_inner = {workload:.3g} exceeds budget {capacity:.3g}; "
            "reduce desk-scale settings"
        )

    values = np.empty((n, m + 1, len(strikes), 2))
    ses = np.empty_like(values)
    sqrt_inner = math.sqrt(n_inner)

    def fill(target_v, target_se, s_term):
        # s_term: (..., n_inner) terminal samples; reduce over the last axis.
        for ki, k in enumerate(strikes):
            for kind_idx, kind in enumerate(("call", "put")):
                payoff = _intrinsic(kind, s_term, k)
                target_v[..., ki, kind_idx] = payoff.mean(axis=-1)
                target_se[..., ki, kind_idx] = payoff.std(axis=-1, ddof=1) / sqrt_inner

    # Step 0: identical states across paths; value once and broadcast.
    s_term0 = _terminal_samples(bundle, 0, slice(0, 1), n_inner, seed)
    fill(values[0, 0][np.newaxis], ses[0, 0][np.newaxis], s_term0)
    values[:, 0] = values[0, 0]
    ses[:, 0] = ses[0, 0]

    for t in range(1, m):
        rem = m - t
        chunk = max(1, _CHUNK_TARGET // (n_inner * rem))
        for lo in range(0, n, chunk):
            sl = slice(lo, min(lo + chunk, n))
            s_term = _terminal_samples(bundle, t, sl, n_inner, seed)
            fill(values[sl, t], ses[sl, t], s_term)

    # Terminal slice: exact intrinsic payoffs.
    for ki, k in enumerate(strikes):
        values[:, m, ki, 0] = _intrinsic("call", bundle.s[:, m], k)
        values[:, m, ki, 1] = _intrinsic("put", bundle.s[:, m], k)
    ses[:, m] = 0.0

    return PricingGrid(values=values, std_errors=ses, strikes=strikes,
                       n_inner=n_inner, seed=seed)

"""Numerical verification of the bounded-martingale stopping result.

Claim under test: if the underlying is a martingale confined to
[k_low, k_high] and the condor is struck k1 < k2 = k_low < k3 = k_high < k4,
the expected normalized profit is non-decreasing in time, so late stopping
is optimal (argmax at the final step).

The bounded martingale is constructed with a state-dependent shrinking step,
S_{t+1} = S_t +/- shrink * min(S_t - k_low, k_high - S_t), which is an exact
martingale strictly inside the bounds.  Legs are marked by nested Monte
Carlo under a lognormal pricing model (r = 0, configurable sigma): pricing
the legs under the bounded process itself would be degenerate, since a path
that can never leave (k_low, k_high) makes every leg payoff identically
zero.  Monotonicity is asserted with 3-standard-error confidence bands;
pricing noise makes strict pathwise checks unattainable.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import StrikeStructureViolation
from .pricer import bs_price, _intrinsic
from .rng import substream


@dataclass(frozen=True)
class BoundedMartingaleSpec:
    k_low: float
    k_high: float
    shrink: float
    n_steps: int
    n_paths: int
    seed: int
    s0: float = 1.0

    def __post_init__(self):
        if not self.k_low < self.s0 < self.k_high:
            raise ValueError("need k_low < s0 < k_high")
        if not 0.0 <= self.shrink < 1.0:
            raise ValueError("shrink must lie in [0, 1)")
        if self.n_steps < 1 or self.n_paths < 1:
            raise ValueError("n_steps and n_paths must be positive")


@dataclass
class SubmartingaleReport:
    means: np.ndarray       # mean phi per step
    diff_ses: np.ndarray    # SE of adjacent paired differences
    violations: int         # steps with m_{t+1} < m_t - 3*SE
    argmax_step: int
    n_steps: int

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def lines(self):
        yield f"steps={self.n_steps} violations={self.violations} argmax={self.argmax_step}"
        for t, m in enumerate(self.means):
            se = self.diff_ses[t - 1] if t > 0 else 0.0
            yield f"t={t:3d} mean_phi={m: .6f} diff_se={se:.6f}"


@dataclass
class ThetaReport:
    """Finite-difference time-decay checks at one (spot, maturity) point."""

    thetas: dict            # strike -> dV/dt (calendar time)
    wing_put_ok: bool       # |Theta(k1)| <= |Theta(k2)|
    wing_call_ok: bool      # |Theta(k4)| <= |Theta(k3)|
    signed_sum: float       # shorts positive; lemma claims >= 0
    sum_ok: bool
    fd_step: float

    @property
    def passed(self) -> bool:
        return self.wing_put_ok and self.wing_call_ok and self.sum_ok


def simulate_bounded_martingale(spec: BoundedMartingaleSpec) -> np.ndarray:
    """Path matrix (n_paths, n_steps + 1), exact martingale inside the bounds."""
    rng = substream(spec.seed)
    signs = rng.integers(0, 2, size=(spec.n_paths, spec.n_steps)) * 2 - 1
    s = np.empty((spec.n_paths, spec.n_steps + 1))
    s[:, 0] = spec.s0
    for t in range(spec.n_steps):
        room = np.minimum(s[:, t] - spec.k_low, spec.k_high - s[:, t])
        s[:, t + 1] = s[:, t] + signs[:, t] * spec.shrink * room
    return s


def _condor_cost(s_term: np.ndarray, strikes) -> np.ndarray:
    k1, k2, k3, k4 = strikes
    return (
        _intrinsic("put", s_term, k2)
        - _intrinsic("put", s_term, k1)
        + _intrinsic("call", s_term, k3)
        - _intrinsic("call", s_term, k4)
    )


def price_condor_lognormal_mc(
    spots: np.ndarray, strikes, sigma: float, tau_years: float, n_inner: int, seed_key
):
    """Condor cost-to-close per spot by terminal-draw MC under GBM (r = 0).

    All four legs share the same draws (common random numbers); returns
    (values, standard errors), each shaped like ``spots``.
    """
    spots = np.atleast_1d(np.asarray(spots, dtype=float))
    if tau_years == 0:
        return _condor_cost(spots, strikes), np.zeros_like(spots)
    z = substream(*seed_key).standard_normal((len(spots), n_inner))
    s_term = spots[:, None] * np.exp(
        -0.5 * sigma ** 2 * tau_years + sigma * math.sqrt(tau_years) * z
    )
    cost = _condor_cost(s_term, strikes)
    return cost.mean(axis=1), cost.std(axis=1, ddof=1) / math.sqrt(n_inner)


def check_submartingale(
    spec: BoundedMartingaleSpec,
    strikes,
    sigma: float = 0.2,
    n_inner: int = 500,
    dt: float = 1.0 / 252.0,
) -> SubmartingaleReport:
    """Mean-profit monotonicity check for the theorem's strike structure.

    Entry credit is the pooled step-0 valuation; phi = (credit - P_t)/credit.
    A violation is an adjacent pair with m_{t+1} < m_t - 3 * SE(paired diff).
    """
    k1, k2, k3, k4 = strikes
    if not (k1 < k2 < k3 < k4):
        raise StrikeStructureViolation("need k1 < k2 < k3 < k4")
    if not (np.isclose(k2, spec.k_low) and np.isclose(k3, spec.k_high)):
        raise StrikeStructureViolation(
            "theorem requires k2 = k_low and k3 = k_high"
        )
    paths = simulate_bounded_martingale(spec)
    m = spec.n_steps
    values = np.empty((spec.n_paths, m + 1))
    for t in range(m + 1):
        tau = (m - t) * dt
        values[:, t], _ = price_condor_lognormal_mc(
            paths[:, t], strikes, sigma, tau, n_inner, (spec.seed, 1, t)
        )
    credit = float(values[:, 0].mean())
    phi = (credit - values) / credit
    means = phi.mean(axis=0)
    diffs = np.diff(phi, axis=1)
    diff_ses = diffs.std(axis=0, ddof=1) / math.sqrt(spec.n_paths)
    violations = int(np.sum(diffs.mean(axis=0) < -3.0 * diff_ses))
    argmax_step = m - int(np.argmax(means[::-1]))
    return SubmartingaleReport(
        means=means, diff_ses=diff_ses, violations=violations,
        argmax_step=argmax_step, n_steps=m,
    )


def theta_ordering(
    s: float,
    strikes,
    sigma: float,
    tau_years: float,
    fd_step: float = 1.0 / 252.0,
    price_fn=bs_price,
    se_fn=None,
) -> ThetaReport:
    """Central finite-difference thetas of the four legs and their ordering.

    Theta here is dV/dt in calendar time (negative for decaying longs).
    Checks |Theta(k1)| <= |Theta(k2)|, |Theta(k4)| <= |Theta(k3)|, and the
    four-leg signed sum with shorts positive >= -3 * propagated SE (zero SE
    for the closed-form oracle).
    """
    k1, k2, k3, k4 = strikes
    if not (k1 < k2 <= s <= k3 < k4):
        raise ValueError("need k1 < k2 <= s <= k3 < k4")
    h = min(fd_step, 0.5 * tau_years)
    legs = [("put", k1), ("put", k2), ("call", k3), ("call", k4)]
    thetas = {}
    ses = {}
    for kind, k in legs:
        lo = price_fn(kind, s, k, sigma, tau_years - h)
        hi = price_fn(kind, s, k, sigma, tau_years + h)
        # dV/dt = -dV/dtau
        thetas[k] = -(hi - lo) / (2.0 * h)
        ses[k] = (se_fn(kind, s, k, sigma, tau_years) / h) if se_fn else 0.0
    tol = 3.0 * math.hypot(*(ses[k] for k in (k1, k2, k3, k4)))
    wing_put_ok = abs(thetas[k1]) <= abs(thetas[k2]) + tol
    wing_call_ok = abs(thetas[k4]) <= abs(thetas[k3]) + tol
    signed_sum = (
        abs(thetas[k2]) - abs(thetas[k1]) + abs(thetas[k3]) - abs(thetas[k4])
    )
    return ThetaReport(
        thetas=thetas,
        wing_put_ok=wing_put_ok,
        wing_call_ok=wing_call_ok,
        signed_sum=signed_sum,
        sum_ok=signed_sum >= -tol,
        fd_step=h,
    )

"""Rough Heston path simulation on a discrete grid.

Variance follows a Volterra equation with power-law kernel
K(t) = t^(H-1/2) / Gamma(H+1/2); the spot is log-Euler with leverage
correlation rho between the two driving Brownian motions.  The explicit
Euler--Volterra scheme uses exact step-integrated kernel weights, so at
H = 0.5 it collapses to a standard Euler--Maruyama Heston discretization.

Because the model is non-Markovian, each path retains its variance-driving
Brownian increments; conditional continuation from any step reuses that
history inside the Volterra convolution.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import IndexOutOfRange, InvalidHorizon, NonpositiveSpot
from .rng import substream

TRADING_DT = 1.0 / 252.0


@dataclass(frozen=True)
class ModelParams:
    """Rough Heston parameter set."""

    h: float
    kappa: float
    theta_mean: float
    nu: float
    rho: float
    v0: float
    mu: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.h < 1.0:
            raise ValueError(f"h must lie in (0, 1), got {self.h}")
        if min(self.kappa, self.theta_mean, self.nu, self.v0) < 0:
            raise ValueError("kappa, theta_mean, nu and v0 must be nonnegative")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho}")


# SPX-calibrated defaults (r = mu = 0); H defaults to the rough regime value 0.1.
DEFAULT_PARAMS = ModelParams(
    h=0.1, kappa=0.1, theta_mean=0.3156, nu=0.0331, rho=-0.681, v0=0.0392, mu=0.0
)


@dataclass(frozen=True)
class SimGrid:
    n_paths: int
    n_steps: int = 63
    dt: float = TRADING_DT
    master_seed: int = 0

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be positive")
        if self.dt <= 0:
            raise ValueError("dt must be positive")


@dataclass
class PathBundle:
    """Simulated ensemble: spot, variance, and retained variance noise.

    ``s`` and ``v`` have shape (n_paths, n_steps + 1); ``dW2`` holds the
    variance-driving Brownian increments, shape (n_paths, n_steps).
    Immutable by convention after construction.
    """

    s: np.ndarray
    v: np.ndarray
    dW2: np.ndarray
    grid: SimGrid
    params: ModelParams

    @property
    def n_paths(self) -> int:
        return self.s.shape[0]

    @property
    def n_steps(self) -> int:
        return self.s.shape[1] - 1


def kernel_weights(h: float, dt: float, n_steps: int) -> np.ndarray:
    """Exact step integrals of the power-law kernel over each grid cell.

    w_j = [(j+1)^(H+1/2) - j^(H+1/2)] * dt^(H+1/2) / ((H+1/2) * Gamma(H+1/2))
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    alpha = h + 0.5
    j = np.arange(n_steps, dtype=float)
    return ((j + 1) ** alpha - j ** alpha) * dt ** alpha / (alpha * math.gamma(alpha))


def _innovations(params: ModelParams, dt: float, v: np.ndarray, dW2: np.ndarray) -> np.ndarray:
    """Per-step Volterra innovations kappa*(theta - V)*dt + nu*sqrt(V)*dW2.

    ``v`` is the stored (already truncated) variance at the left endpoints,
    shape (..., n_steps); the convolution applies weights w_j / dt.
    """
    vp = np.maximum(v, 0.0)
    return params.kappa * (params.theta_mean - vp) * dt + params.nu * np.sqrt(vp) * dW2


def _path_noise(master_seed: int, path_index: int, n_steps: int) -> np.ndarray:
    """Noise substream for one path: shape (2, n_steps) of unit normals."""
    return substream(master_seed, path_index).standard_normal((2, n_steps))


def simulate(params: ModelParams, grid: SimGrid, s0: float = 1.0) -> PathBundle:
    """Simulate correlated (S, V) paths under rough Heston dynamics.

    Per-path noise streams are keyed by (master_seed, path_index), so the
    result is bit-identical no matter how paths are chunked across workers.
    """
    if grid.n_steps == 0:
        raise InvalidHorizon("n_steps must be at least 1")
    if s0 <= 0:
        raise NonpositiveSpot(f"s0 must be positive, got {s0}")

    n, m, dt = grid.n_paths, grid.n_steps, grid.dt
    z2 = np.empty((n, m))
    zp = np.empty((n, m))
    for p in range(n):
        z = _path_noise(grid.master_seed, p, m)
        z2[p] = z[0]
        zp[p] = z[1]
    dW2 = np.sqrt(dt) * z2
    z1 = params.rho * z2 + math.sqrt(1.0 - params.rho ** 2) * zp

    a = kernel_weights(params.h, dt, m) / dt
    v = np.empty((n, m + 1))
    v[:, 0] = params.v0
    f = np.empty((n, m))
    log_s = np.empty((n, m + 1))
    log_s[:, 0] = math.log(s0)
    for i in range(m):
        vi = v[:, i]
        f[:, i] = _innovations(params, dt, vi, dW2[:, i])
        v[:, i + 1] = np.maximum(0.0, params.v0 + f[:, : i + 1] @ a[i::-1])
        log_s[:, i + 1] = (
            log_s[:, i] + (params.mu - 0.5 * vi) * dt + np.sqrt(vi * dt) * z1[:, i]
        )
    return PathBundle(s=np.exp(log_s), v=v, dW2=dW2, grid=grid, params=params)


def continue_paths(
    bundle: PathBundle,
    path_index: int,
    from_step: int,
    n_inner: int,
    inner_seed,
) -> PathBundle:
    """Branch ``n_inner`` fresh continuations off one path at ``from_step``.

    The Volterra sums reuse the outer path's retained history for steps
    before ``from_step`` and fresh increments afterwards; the outer bundle
    is never mutated.  ``inner_seed`` may be an int or a key tuple.
    """
    if not 0 <= path_index < bundle.n_paths:
        raise IndexOutOfRange(f"path_index {path_index} out of range")
    if not 0 <= from_step <= bundle.n_steps:
        raise IndexOutOfRange(f"from_step {from_step} out of range")
    params, dt = bundle.params, bundle.grid.dt
    rem = bundle.n_steps - from_step
    key = inner_seed if isinstance(inner_seed, tuple) else (inner_seed,)
    seed_scalar = key[0] if len(key) == 1 else 0

    if rem == 0:
        grid = SimGrid(n_paths=n_inner, n_steps=0, dt=dt, master_seed=seed_scalar)
        s = np.full((n_inner, 1), bundle.s[path_index, -1])
        v = np.full((n_inner, 1), bundle.v[path_index, -1])
        return PathBundle(s=s, v=v, dW2=np.empty((n_inner, 0)), grid=grid, params=params)

    z = substream(*key).standard_normal((2, n_inner, rem))
    f_out = _innovations(params, dt, bundle.v[path_index, :from_step],
                         bundle.dW2[path_index, :from_step])
    s0_cont = bundle.s[path_index, from_step]
    v0_cont = bundle.v[path_index, from_step]
    s, v, dW2 = _continue_block(
        params, dt, bundle.n_steps, from_step,
        f_out[np.newaxis, :], np.array([s0_cont]), np.array([v0_cont]),
        z[0][np.newaxis], z[1][np.newaxis],
    )
    grid = SimGrid(n_paths=n_inner, n_steps=rem, dt=dt, master_seed=seed_scalar)
    return PathBundle(s=s[0], v=v[0], dW2=dW2[0], grid=grid, params=params)


def _continue_block(params, dt, n_steps, from_step, f_out, s_from, v_from, z2, zp):
    """Vectorized continuation for a block of outer paths.

    f_out: (n_block, from_step) retained innovations.
    s_from, v_from: (n_block,) states at from_step.
    z2, zp: (n_block, n_inner, rem) unit normals.
    Returns (s, v, dW2) with shapes (n_block, n_inner, rem + 1 / rem).
    """
    rem = n_steps - from_step
    n_block, n_inner = z2.shape[0], z2.shape[1]
    a = kernel_weights(params.h, dt, n_steps) / dt

    # Outer-history contribution to each future step in one matrix product:
    # hist[b, ii] = sum_{j < from_step} a[from_step + ii - j] * f_out[b, j]
    if from_step > 0:
        lag = (from_step + np.arange(rem)[:, None]) - np.arange(from_step)[None, :]
        hist = f_out @ a[lag].T  # (n_block, rem)
    else:
        hist = np.zeros((n_block, rem))
    base = params.v0 + hist

    dW2 = np.sqrt(dt) * z2
    z1 = params.rho * z2 + math.sqrt(1.0 - params.rho ** 2) * zp

    v = np.empty((n_block, n_inner, rem + 1))
    v[:, :, 0] = v_from[:, None]
    f_in = np.empty((n_block, n_inner, rem))
    log_s = np.empty((n_block, n_inner, rem + 1))
    log_s[:, :, 0] = np.log(s_from)[:, None]
    flat = n_block * n_inner
    for ii in range(rem):
        vi = v[:, :, ii]
        f_in[:, :, ii] = _innovations(params, dt, vi, dW2[:, :, ii])
        conv = (f_in[:, :, : ii + 1].reshape(flat, ii + 1) @ a[ii::-1]).reshape(
            n_block, n_inner
        )
        v[:, :, ii + 1] = np.maximum(0.0, base[:, None, ii] + conv)
        log_s[:, :, ii + 1] = (
            log_s[:, :, ii]
            + (params.mu - 0.5 * vi) * dt
            + np.sqrt(vi * dt) * z1[:, :, ii]
        )
    return np.exp(log_s), v, dW2


def estimate_roughness(v: np.ndarray, max_lag: int = 10) -> float:
    """Hurst estimate from second-order structure functions of log-variance.

    Regresses log m(l) on log l for lags 1..max_lag, where
    m(l) = mean |log V_{t+l} - log V_t|^2; the slope is ~2H.
    """
    log_v = np.log(np.maximum(v, 1e-12))
    lags = np.arange(1, max_lag + 1)
    m = np.array([np.mean((log_v[:, lag:] - log_v[:, :-lag]) ** 2) for lag in lags])
    slope = np.polyfit(np.log(lags), np.log(m), 1)[0]
    return 0.5 * slope

"""Regime partitions, profitability/risk metrics, and parameter sweeps.

Paths split into bullish / sideways / bearish by S_T / S_0 against the
(0.9, 1.1) thresholds; boundary ratios land in sideways.  Normalized
profit is phi_t = (credit - P_t) / credit; the empirical optimal stopping
time tau is the argmax over steps of the mean phi curve on the full
dataset and is then reused for every conditional metric.
"""

from dataclasses import dataclass, field

import numpy as np

from . import condor
from .errors import EmptySubset, NonpositiveCredit
from .pricer import build_pricing_grid
from .rng import derive_seed
from .roughheston import ModelParams, PathBundle, SimGrid, simulate

BULLISH = "bullish"
SIDEWAYS = "sideways"
BEARISH = "bearish"

STRIKE_INCREMENT = 0.02
AXES = ("moneyness", "span", "asymmetry")

# Fixed-parameter defaults for each sweep axis (x, xhat, xbar).
SWEEP_FIXED_DEFAULTS = {
    "moneyness": {"span": 0.04, "asymmetry": 0.0},
    "span": {"moneyness": 0.02, "asymmetry": 0.0},
    "asymmetry": {"moneyness": 0.04, "span": 0.04},
}


@dataclass
class RegimePartition:
    labels: np.ndarray
    thresholds: tuple = (0.9, 1.1)

    def mask(self, label: str) -> np.ndarray:
        return self.labels == label


@dataclass
class MetricsRow:
    """One row of the sweep report (eta fields are None when a regime is empty)."""

    control: dict
    phi_T: float
    phi_tau: float
    tau: float
    theta_T: float
    theta_tau: float
    phi_T_M: float | None
    phi_tau_M: float | None
    eta_T_r: float | None
    eta_tau_r: float | None
    eta_T_l: float | None
    eta_tau_l: float | None

    METRIC_FIELDS = (
        "phi_T", "phi_tau", "tau", "theta_T", "theta_tau",
        "phi_T_M", "phi_tau_M", "eta_T_r", "eta_tau_r", "eta_T_l", "eta_tau_l",
    )


@dataclass
class SweepConfig:
    axis: str
    values: list
    fixed: dict = field(default_factory=dict)
    repeats: int = 5

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if self.repeats < 1:
            raise ValueError("repeats must be positive")
        for v in self.values:
            if abs(v / STRIKE_INCREMENT - round(v / STRIKE_INCREMENT)) > 1e-9:
                raise ValueError(
                    f"sweep value {v} is not on the {STRIKE_INCREMENT} strike lattice"
                )

    def control(self, value: float) -> dict:
        fixed = {**SWEEP_FIXED_DEFAULTS[self.axis], **self.fixed}
        fixed.pop(self.axis, None)
        return {self.axis: value, **fixed}


def partition(s0: float, s_t_per_path) -> RegimePartition:
    """Classify paths by terminal ratio; exactly 0.9 / 1.1 count as sideways."""
    if s0 <= 0:
        raise ValueError("s0 must be positive")
    ratio = np.asarray(s_t_per_path, dtype=float) / s0
    labels = np.full(ratio.shape, SIDEWAYS, dtype=object)
    labels[ratio > 1.1] = BULLISH
    labels[ratio < 0.9] = BEARISH
    return RegimePartition(labels=labels)


def phi_process(values: np.ndarray, credit: float) -> np.ndarray:
    """Normalized profit (credit - P_t) / credit per (path, step)."""
    if credit <= 0:
        raise NonpositiveCredit(f"credit must be positive, got {credit}")
    return (credit - np.asarray(values, dtype=float)) / credit


def optimal_tau(phi: np.ndarray, subset=None):
    """Argmax step of the mean profit curve; ties break toward the largest t."""
    if subset is None:
        subset = np.ones(phi.shape[0], dtype=bool)
    subset = np.asarray(subset, dtype=bool)
    if not subset.any():
        raise EmptySubset("optimal_tau requires a non-empty subset")
    means = phi[subset].mean(axis=0)
    tau = len(means) - 1 - int(np.argmax(means[::-1]))
    return tau, float(means[tau])


def success_rates(phi: np.ndarray, tau: int, subset=None):
    """Fractions of subset paths with positive profit at T and at tau."""
    if subset is None:
        subset = np.ones(phi.shape[0], dtype=bool)
    subset = np.asarray(subset, dtype=bool)
    if not subset.any():
        raise EmptySubset("success_rates requires a non-empty subset")
    sub = phi[subset]
    return float(np.mean(sub[:, -1] > 0)), float(np.mean(sub[:, tau] > 0))


def risk_metrics(phi: np.ndarray, tau: int, part: RegimePartition):
    """Conditional mean profits over the bullish and bearish regimes.

    Returns (eta_T_r, eta_tau_r, eta_T_l, eta_tau_l); fields are None when
    the corresponding regime holds no paths.
    """
    out = []
    for label in (BULLISH, BEARISH):
        mask = part.mask(label)
        if mask.any():
            out.extend([float(phi[mask, -1].mean()), float(phi[mask, tau].mean())])
        else:
            out.extend([None, None])
    return tuple(out)


def metrics_row(phi: np.ndarray, part: RegimePartition, control: dict) -> MetricsRow:
    """All Table-style metrics for one portfolio; tau fixed on the full dataset."""
    tau, phi_tau = optimal_tau(phi)
    theta_t, theta_tau = success_rates(phi, tau)
    side = part.mask(SIDEWAYS)
    if side.any():
        phi_t_m = float(phi[side, -1].mean())
        phi_tau_m = float(phi[side, tau].mean())
    else:
        phi_t_m = phi_tau_m = None
    eta = risk_metrics(phi, tau, part)
    return MetricsRow(
        control=control,
        phi_T=float(phi[:, -1].mean()),
        phi_tau=phi_tau,
        tau=float(tau),
        theta_T=theta_t,
        theta_tau=theta_tau,
        phi_T_M=phi_t_m,
        phi_tau_M=phi_tau_m,
        eta_T_r=eta[0],
        eta_tau_r=eta[1],
        eta_T_l=eta[2],
        eta_tau_l=eta[3],
    )


def _mean_or_none(values):
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


def average_rows(rows) -> MetricsRow:
    """Field-wise mean across repeat rows (tau averaged as a real number)."""
    rows = list(rows)
    merged = {f: _mean_or_none([getattr(r, f) for r in rows]) for f in MetricsRow.METRIC_FIELDS}
    return MetricsRow(control=rows[0].control, **merged)


@dataclass
class SweepResult:
    rows: list
    config: SweepConfig
    phi_curves: dict  # axis value -> averaged per-step mean phi over repeats
    phi_by_repeat: dict  # axis value -> list of per-repeat phi matrices


def sweep_strikes(config: SweepConfig, s0: float = 1.0):
    """Strike sets per axis value plus the sorted union lattice."""
    per_value = {}
    for value in config.values:
        c = config.control(value)
        per_value[value] = condor.from_params(
            c["moneyness"], c["span"], c["asymmetry"], s0=s0
        )
    union = sorted({k for ks in per_value.values() for k in ks})
    return per_value, union


def run_sweep(
    config: SweepConfig,
    model: ModelParams,
    grid: SimGrid,
    n_inner: int = 500,
    s0: float = 1.0,
    workers: int = 1,
) -> SweepResult:
    """Evaluate each axis value at ``repeats`` reseeded datasets and average.

    One path bundle and one pricing grid over the union of all required
    strikes are shared across the sweep points of a repeat; repeats are
    independent jobs reduced in fixed order.
    """
    per_value, union = sweep_strikes(config, s0)
    jobs = [
        (config, model, grid, n_inner, s0, r, per_value, union)
        for r in range(config.repeats)
    ]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            repeat_results = list(pool.map(_run_repeat, jobs))
    else:
        repeat_results = [_run_repeat(job) for job in jobs]

    rows = []
    curves = {}
    phis = {}
    for value in config.values:
        rows.append(average_rows([res[value][0] for res in repeat_results]))
        curves[value] = np.mean(
            [res[value][1].mean(axis=0) for res in repeat_results], axis=0
        )
        phis[value] = [res[value][1] for res in repeat_results]
    order = np.argsort(config.values)
    return SweepResult(
        rows=[rows[i] for i in order],
        config=config,
        phi_curves=curves,
        phi_by_repeat=phis,
    )


def _run_repeat(job):
    config, model, grid, n_inner, s0, repeat, per_value, union = job
    sim_seed = derive_seed(grid.master_seed, repeat)
    price_seed = derive_seed(grid.master_seed, repeat, 1)
    rgrid = SimGrid(
        n_paths=grid.n_paths, n_steps=grid.n_steps, dt=grid.dt, master_seed=sim_seed
    )
    bundle = simulate(model, rgrid, s0)
    pgrid = build_pricing_grid(bundle, union, n_inner, price_seed)
    part = partition(s0, bundle.s[:, -1])
    out = {}
    for value, strikes in per_value.items():
        spec = condor.from_strikes(*strikes, grid=pgrid, params=config.control(value))
        phi = phi_process(condor.value_process(spec, pgrid), spec.credit)
        out[value] = (metrics_row(phi, part, config.control(value)), phi)
    return out

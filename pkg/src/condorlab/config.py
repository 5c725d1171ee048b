"""Experiment configuration: YAML file + flag overrides + defaults.

Precedence is overrides > file > built-in desk-scale defaults.  Seeds live
in the config, never wall-clock, so every command is deterministic.
"""

import copy
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError
from .metrics import SweepConfig
from .roughheston import ModelParams, SimGrid, TRADING_DT

FORMAT_VERSION = 1

# Desk-scale defaults; the paper-scale profile (configs/paper.yaml) raises
# n_paths to 10000 and repeats to 30.
DESK_DEFAULTS = {
    "model": {
        "h": 0.1, "kappa": 0.1, "theta_mean": 0.3156, "nu": 0.0331,
        "rho": -0.681, "v0": 0.0392, "mu": 0.0,
    },
    "grid": {"n_paths": 2000, "n_steps": 63, "dt": TRADING_DT, "master_seed": 7},
    "pricing": {"strikes": None, "n_inner": 500},
    "s0": 1.0,
    "output_dir": "out",
    "format_version": FORMAT_VERSION,
    "theorem": {
        "k_low": 0.96, "k_high": 1.04, "shrink": 0.3,
        "n_steps": 63, "n_paths": 1000, "seed": 11,
        "strikes": [0.92, 0.96, 1.04, 1.08], "sigma": 0.2, "n_inner": 500,
    },
}

LATTICE_RANGE = (0.8, 1.2)


@dataclass
class ExperimentConfig:
    model: ModelParams
    grid: SimGrid
    strikes: list
    n_inner: int
    s0: float
    output_dir: Path
    format_version: int
    sweep: SweepConfig | None = None
    portfolios: list = field(default_factory=list)
    theorem: dict = field(default_factory=dict)
    replay_portfolios: list = field(default_factory=list)


def _deep_update(base: dict, extra: dict) -> dict:
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value
    return base


def _coerce(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def apply_overrides(data: dict, overrides) -> dict:
    """Apply dotted key=value overrides, e.g. ``model.h=0.2``."""
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        dotted, _, raw = item.partition("=")
        node = data
        *parents, leaf = dotted.split(".")
        for part in parents:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {item!r} crosses a non-mapping field")
        node[leaf] = _coerce(raw)
    return data


def _require(section: dict, name: str, where: str):
    if name not in section or section[name] is None:
        raise ConfigError(f"missing required field `{where}.{name}`")
    return section[name]


def load_config(path=None, overrides=None, output_dir=None) -> ExperimentConfig:
    """Load and validate an experiment configuration."""
    data = copy.deepcopy(DESK_DEFAULTS)
    if path is not None:
        try:
            loaded = yaml.safe_load(Path(path).read_text())
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        _deep_update(data, loaded)
    apply_overrides(data, overrides)
    if output_dir is not None:
        data["output_dir"] = output_dir

    try:
        model = ModelParams(**{
            k: float(_require(data["model"], k, "model"))
            for k in ("h", "kappa", "theta_mean", "nu", "rho", "v0", "mu")
        })
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc
    g = data["grid"]
    try:
        grid = SimGrid(
            n_paths=int(_require(g, "n_paths", "grid")),
            n_steps=int(_require(g, "n_steps", "grid")),
            dt=float(_require(g, "dt", "grid")),
            master_seed=int(_require(g, "master_seed", "grid")),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid grid: {exc}") from exc

    strikes = data["pricing"].get("strikes") or []
    for k in strikes:
        if not LATTICE_RANGE[0] <= k <= LATTICE_RANGE[1]:
            warnings.warn(
                f"strike {k} lies outside the usual lattice {LATTICE_RANGE}",
                stacklevel=2,
            )

    sweep = None
    if "sweep" in data and data["sweep"]:
        s = data["sweep"]
        try:
            sweep = SweepConfig(
                axis=_require(s, "axis", "sweep"),
                values=[float(v) for v in _require(s, "values", "sweep")],
                fixed={k: float(v) for k, v in (s.get("fixed") or {}).items()},
                repeats=int(s.get("repeats", 5)),
            )
        except ValueError as exc:
            raise ConfigError(f"invalid sweep: {exc}") from exc

    return ExperimentConfig(
        model=model,
        grid=grid,
        strikes=[float(k) for k in strikes],
        n_inner=int(data["pricing"].get("n_inner", 500)),
        s0=float(data.get("s0", 1.0)),
        output_dir=Path(data["output_dir"]),
        format_version=int(data.get("format_version", FORMAT_VERSION)),
        sweep=sweep,
        portfolios=data.get("portfolios") or [],
        theorem=data.get("theorem") or {},
        replay_portfolios=data.get("replay", {}).get("portfolios") or [],
    )

"""Iron Condor simulation and analysis under rough-volatility dynamics."""

from .condor import CondorSpec, ValueTensor
from .metrics import MetricsRow, SweepConfig
from .pricer import PricingGrid, bs_price
from .roughheston import DEFAULT_PARAMS, ModelParams, PathBundle, SimGrid, simulate

__all__ = [
    "CondorSpec",
    "DEFAULT_PARAMS",
    "MetricsRow",
    "ModelParams",
    "PathBundle",
    "PricingGrid",
    "SimGrid",
    "SweepConfig",
    "ValueTensor",
    "bs_price",
    "simulate",
]

__version__ = "0.1.0"

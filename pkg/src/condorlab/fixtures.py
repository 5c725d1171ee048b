"""Synthetic option-chain fixtures for the replay module.

Three deterministic scenarios on an SPX-like level of 4000: a bull trend
ending at ratio 1.02, a sideways drift ending flat, and a crash ending at
ratio 0.80.  Quotes are Black--Scholes mids (sigma = 0.2, r = 0) with a
proportional 2% half-spread; the final snapshot settles at intrinsic.

The bull scenario is engineered so the put-side-shifted asymmetric condor
(k3 above the terminal spot) keeps its full credit while a symmetric
at-the-money condor does not.
"""

import datetime as dt
from pathlib import Path

import numpy as np

from .pricer import bs_price

S0 = 4000.0
SIGMA = 0.2
START_DATE = dt.date(2021, 1, 4)

SCENARIOS = {
    "bull": {"n_days": 63, "terminal_ratio": 1.02},
    "sideways": {"n_days": 63, "terminal_ratio": 1.00},
    "crash": {"n_days": 49, "terminal_ratio": 0.80},
}


def _underlying_path(scenario: str, n_days: int) -> np.ndarray:
    frac = np.linspace(0.0, 1.0, n_days)
    ratio = SCENARIOS[scenario]["terminal_ratio"]
    if scenario == "sideways":
        levels = 1.0 + 0.01 * np.sin(2 * np.pi * frac)
        levels[-1] = ratio
    else:
        levels = 1.0 + (ratio - 1.0) * frac ** 2
    return S0 * levels


def fixture_dates(n_days: int) -> list:
    """Weekday sequence starting at the fixed fixture epoch."""
    dates = []
    day = START_DATE
    while len(dates) < n_days:
        if day.weekday() < 5:
            dates.append(day)
        day += dt.timedelta(days=1)
    return dates


def write_fixture(directory, scenario: str) -> Path:
    """Write one scenario's chain CSVs into ``directory`` and return it."""
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; pick from {sorted(SCENARIOS)}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    n_days = SCENARIOS[scenario]["n_days"]
    dates = fixture_dates(n_days)
    expiry = dates[-1]
    closes = _underlying_path(scenario, n_days)
    strikes = S0 * np.round(np.arange(0.70, 1.3001, 0.02), 2)

    for i, (date, close) in enumerate(zip(dates, closes)):
        close = float(close)
        tau = (n_days - 1 - i) / 252.0
        lines = [",".join(
            ["date", "underlying_close", "expiry", "strike", "kind", "bid", "ask"]
        )]
        for strike in strikes:
            for kind in ("call", "put"):
                mid = float(bs_price(kind, close, float(strike), SIGMA, tau))
                bid, ask = 0.98 * mid, 1.02 * mid
                lines.append(
                    f"{date.isoformat()},{close!r},{expiry.isoformat()},"
                    f"{float(strike)!r},{kind},{bid!r},{ask!r}"
                )
        (directory / f"chain_{date.isoformat()}.csv").write_text("\n".join(lines) + "\n")
    return directory


def write_all_fixtures(root) -> dict:
    root = Path(root)
    return {name: write_fixture(root / name, name) for name in sorted(SCENARIOS)}

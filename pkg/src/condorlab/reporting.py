"""Report emission: metric tables (CSV + Markdown), figure data, and SVG.

Table columns follow the published order: control value, phi_T, phi_tau,
tau, theta_T, theta_tau, phi_T|M, phi_tau|M, eta_T|r, eta_tau|r, eta_T|l,
eta_tau|l.  CSV and Markdown are rendered from the same 4-decimal strings.
The SVG chart is hand-rolled (polylines only) so reruns are byte-identical.
"""

import csv
from pathlib import Path

import numpy as np

from .metrics import MetricsRow, SweepResult

COLUMNS = [
    "phi_T", "phi_tau", "tau", "theta_T", "theta_tau",
    "phi_T_M", "phi_tau_M", "eta_T_r", "eta_tau_r", "eta_T_l", "eta_tau_l",
]

AXIS_HEADER = {"moneyness": "x", "span": "xhat", "asymmetry": "xbar"}

_PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def _fmt(value) -> str:
    return "" if value is None else f"{value:.4f}"


def _row_cells(axis_value, row: MetricsRow):
    return [_fmt(axis_value)] + [_fmt(getattr(row, c)) for c in COLUMNS]


def write_metrics_csv(result: SweepResult, path) -> Path:
    path = Path(path)
    header = [AXIS_HEADER[result.config.axis]] + COLUMNS
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for value, row in zip(sorted(result.config.values), result.rows):
            writer.writerow(_row_cells(value, row))
    return path


def write_metrics_markdown(result: SweepResult, path) -> Path:
    path = Path(path)
    header = [AXIS_HEADER[result.config.axis]] + COLUMNS
    table = [header] + [
        _row_cells(value, row)
        for value, row in zip(sorted(result.config.values), result.rows)
    ]
    widths = [max(len(r[j]) for r in table) for j in range(len(header))]
    lines = []
    for i, cells in enumerate(table):
        lines.append("| " + " | ".join(c.rjust(w) for c, w in zip(cells, widths)) + " |")
        if i == 0:
            lines.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
    path.write_text("\n".join(lines) + "\n")
    return path


def write_figure_data(result: SweepResult, directory) -> list:
    """Per-portfolio mean and decile bands of phi across time steps."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    deciles = list(range(10, 100, 10))
    written = []
    for value in sorted(result.config.values):
        phi = np.vstack(result.phi_by_repeat[value])
        path = directory / f"figure_phi_{AXIS_HEADER[result.config.axis]}_{value:+.2f}.csv"
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["t", "mean"] + [f"d{d}" for d in deciles])
            bands = np.percentile(phi, deciles, axis=0)
            for t in range(phi.shape[1]):
                writer.writerow(
                    [t, repr(float(phi[:, t].mean()))]
                    + [repr(float(bands[j, t])) for j in range(len(deciles))]
                )
        written.append(path)
    return written


def polyline_svg(curves: dict, title: str, width: int = 640, height: int = 400) -> str:
    """Minimal deterministic line chart: one polyline per labelled curve."""
    pad = 48
    all_y = np.concatenate([np.asarray(y, dtype=float) for y in curves.values()])
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    n = max(len(y) for y in curves.values())

    def sx(i):
        return pad + (width - 2 * pad) * i / max(n - 1, 1)

    def sy(v):
        return height - pad - (height - 2 * pad) * (v - y_lo) / (y_hi - y_lo)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{pad - 6}" y="{sy(y_lo):.2f}" text-anchor="end" font-size="10">{y_lo:.3f}</text>',
        f'<text x="{pad - 6}" y="{sy(y_hi):.2f}" text-anchor="end" font-size="10">{y_hi:.3f}</text>',
    ]
    for idx, (label, ys) in enumerate(curves.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        points = " ".join(f"{sx(i):.2f},{sy(float(v)):.2f}" for i, v in enumerate(ys))
        parts.append(f'<polyline fill="none" stroke="{color}" points="{points}"/>')
        parts.append(
            f'<text x="{width - pad + 4}" y="{pad + 14 * idx}" font-size="10" '
            f'fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_sweep_svg(result: SweepResult, path) -> Path:
    path = Path(path)
    axis = AXIS_HEADER[result.config.axis]
    curves = {
        f"{axis}={value:+.2f}": result.phi_curves[value]
        for value in sorted(result.config.values)
    }
    path.write_text(polyline_svg(curves, f"mean profit curves by {axis}"))
    return path


def write_theorem_report(report, path) -> Path:
    path = Path(path)
    path.write_text("\n".join(report.lines()) + "\n")
    return path


def write_replay_csv(results: dict, path) -> Path:
    """Per-portfolio P&L rows: date,portfolio_id,pnl."""
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["date", "portfolio_id", "pnl"])
        for portfolio_id, result in results.items():
            for date, pnl in zip(result.dates, result.pnl):
                writer.writerow([date.isoformat(), portfolio_id, repr(float(pnl))])
    return path

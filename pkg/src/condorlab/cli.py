"""Command-line entry point tying the pipeline together.

Exit codes: 0 success, 1 runtime failure, 2 configuration or input error.
All randomness comes from seeds in the config, so reruns with the same
config write byte-identical artifacts regardless of worker count.
"""

import os
import sys
import time
from pathlib import Path

import click

from . import condor, datasets, fixtures, metrics, replay as replay_mod, reporting
from .config import load_config
from .errors import CondorLabError, ConfigError
from .pricer import build_pricing_grid
from .rng import derive_seed
from .roughheston import simulate
from .theoremlab import BoundedMartingaleSpec, check_submartingale

ENV_OUTPUT_DIR = "CONDORLAB_OUTPUT_DIR"


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(2 if isinstance(exc, ConfigError) else 1)


def _load(ctx) -> "config.ExperimentConfig":
    try:
        return load_config(
            ctx.obj["config"], ctx.obj["overrides"],
            ctx.obj["output_dir"] or os.environ.get(ENV_OUTPUT_DIR),
        )
    except ConfigError as exc:
        _fail(exc)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="YAML experiment configuration.")
@click.option("--output-dir", default=None,
              help=f"Output directory (default: config value or ${ENV_OUTPUT_DIR}).")
@click.option("-o", "--override", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Dotted config override, e.g. -o model.h=0.2 (repeatable).")
@click.option("--workers", default=1, show_default=True,
              help="Worker processes; outputs are worker-count invariant.")
@click.pass_context
def main(ctx, config_path, output_dir, overrides, workers):
    """Iron Condor simulation and analysis under rough-volatility dynamics."""
    ctx.ensure_object(dict)
    ctx.obj.update(
        config=config_path, output_dir=output_dir,
        overrides=list(overrides), workers=workers,
    )


@main.command("simulate")
@click.pass_context
def simulate_cmd(ctx):
    """Simulate a path bundle and persist it as a dataset directory."""
    cfg = _load(ctx)
    start = time.perf_counter()
    try:
        bundle = simulate(cfg.model, cfg.grid, cfg.s0)
        out = datasets.save_bundle(bundle, cfg.output_dir / "bundle")
    except CondorLabError as exc:
        _fail(exc)
    click.echo(
        f"simulated n_paths={cfg.grid.n_paths} n_steps={cfg.grid.n_steps} "
        f"seed={cfg.grid.master_seed} elapsed={time.perf_counter() - start:.2f}s -> {out}"
    )


@main.command("price")
@click.pass_context
def price_cmd(ctx):
    """Simulate, price the configured strike list, and persist the grid."""
    cfg = _load(ctx)
    if not cfg.strikes:
        _fail(ConfigError("missing required field `pricing.strikes`"))
    try:
        bundle = simulate(cfg.model, cfg.grid, cfg.s0)
        grid = build_pricing_grid(
            bundle, sorted(cfg.strikes), cfg.n_inner,
            derive_seed(cfg.grid.master_seed, 1),
        )
        datasets.save_bundle(bundle, cfg.output_dir / "bundle")
        out = datasets.save_pricing_grid(grid, cfg.output_dir / "grid")
    except CondorLabError as exc:
        _fail(exc)
    click.echo(f"priced {len(cfg.strikes)} strikes at n_inner={cfg.n_inner} -> {out}")


@main.command("sweep")
@click.option("--axis", type=click.Choice(sorted(metrics.AXES)), default=None,
              help="Sweep axis (defaults to the config's sweep.axis).")
@click.pass_context
def sweep_cmd(ctx, axis):
    """Run a control-parameter sweep and emit the metrics table."""
    cfg = _load(ctx)
    if cfg.sweep is None:
        _fail(ConfigError("missing required section `sweep`"))
    sweep = cfg.sweep
    if axis is not None and axis != sweep.axis:
        sweep = metrics.SweepConfig(
            axis=axis, values=sweep.values, fixed=sweep.fixed, repeats=sweep.repeats
        )
    try:
        result = metrics.run_sweep(
            sweep, cfg.model, cfg.grid, n_inner=cfg.n_inner, s0=cfg.s0,
            workers=ctx.obj["workers"],
        )
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        stem = f"sweep_{sweep.axis}"
        reporting.write_metrics_csv(result, cfg.output_dir / f"{stem}.csv")
        reporting.write_metrics_markdown(result, cfg.output_dir / f"{stem}.md")
        reporting.write_figure_data(result, cfg.output_dir / f"{stem}_figures")
        reporting.write_sweep_svg(result, cfg.output_dir / f"{stem}.svg")
    except CondorLabError as exc:
        _fail(exc)
    click.echo(f"sweep over {sweep.axis}: {len(result.rows)} rows -> {cfg.output_dir}")


@main.command("metrics")
@click.pass_context
def metrics_cmd(ctx):
    """Evaluate the configured portfolios once and emit a metrics table."""
    cfg = _load(ctx)
    if not cfg.portfolios:
        _fail(ConfigError("missing required section `portfolios`"))
    try:
        bundle = simulate(cfg.model, cfg.grid, cfg.s0)
        strike_sets = [
            condor.from_params(
                float(p.get("moneyness", 0.04)), float(p.get("span", 0.04)),
                float(p.get("asymmetry", 0.0)), s0=cfg.s0,
            )
            for p in cfg.portfolios
        ]
        union = sorted({k for ks in strike_sets for k in ks})
        grid = build_pricing_grid(
            bundle, union, cfg.n_inner, derive_seed(cfg.grid.master_seed, 1)
        )
        part = metrics.partition(cfg.s0, bundle.s[:, -1])
        rows = []
        for p, strikes in zip(cfg.portfolios, strike_sets):
            spec = condor.from_strikes(*strikes, grid=grid, params=dict(p))
            phi = metrics.phi_process(condor.value_process(spec, grid), spec.credit)
            rows.append(metrics.metrics_row(phi, part, dict(p)))
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        path = cfg.output_dir / "metrics.csv"
        import csv as _csv

        with path.open("w", newline="") as handle:
            writer = _csv.writer(handle)
            writer.writerow(["portfolio"] + reporting.COLUMNS)
            for i, row in enumerate(rows):
                writer.writerow(
                    [i] + [("" if getattr(row, c) is None else f"{getattr(row, c):.4f}")
                           for c in reporting.COLUMNS]
                )
    except CondorLabError as exc:
        _fail(exc)
    click.echo(f"metrics for {len(rows)} portfolios -> {path}")


@main.command("theorem-check")
@click.pass_context
def theorem_cmd(ctx):
    """Verify non-decreasing mean profit under the bounded-martingale harness."""
    cfg = _load(ctx)
    t = cfg.theorem
    try:
        if float(t["k_low"]) >= float(t["k_high"]):
            raise ConfigError("theorem: k_low must be below k_high")
        spec = BoundedMartingaleSpec(
            k_low=float(t["k_low"]), k_high=float(t["k_high"]),
            shrink=float(t["shrink"]), n_steps=int(t["n_steps"]),
            n_paths=int(t["n_paths"]), seed=int(t["seed"]),
            s0=float(t.get("s0", 1.0)),
        )
        report = check_submartingale(
            spec, [float(k) for k in t["strikes"]],
            sigma=float(t.get("sigma", 0.2)), n_inner=int(t.get("n_inner", 500)),
            dt=cfg.grid.dt,
        )
    except (KeyError, ValueError) as exc:
        _fail(ConfigError(f"invalid theorem section: {exc}"))
    except CondorLabError as exc:
        _fail(exc)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    out = reporting.write_theorem_report(report, cfg.output_dir / "theorem_report.txt")
    click.echo(
        f"violations={report.violations} argmax={report.argmax_step}/{report.n_steps} -> {out}"
    )
    if not report.passed:
        sys.exit(1)


@main.command("replay")
@click.option("--chains-dir", required=True, type=click.Path(file_okay=False),
              help="Directory of option-chain CSV snapshots.")
@click.pass_context
def replay_cmd(ctx, chains_dir):
    """Replay the configured portfolios over historical chain snapshots."""
    cfg = _load(ctx)
    portfolios = cfg.replay_portfolios or [
        {"moneyness": 0.04, "span": 0.04, "asymmetry": 0.0}
    ]
    try:
        chains = replay_mod.load_chains(chains_dir)
        expiry = max(r.expiry for snap in chains for r in snap.rows)
        results = {}
        for i, p in enumerate(portfolios):
            spec = replay_mod.select_strikes(
                chains[0], expiry,
                float(p.get("moneyness", 0.04)), float(p.get("span", 0.04)),
                float(p.get("asymmetry", 0.0)),
            )
            results[i] = replay_mod.replay_pnl(chains, spec, expiry)
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        out = reporting.write_replay_csv(results, cfg.output_dir / "replay_pnl.csv")
        curves = {f"p{i}": r.pnl for i, r in results.items()}
        (cfg.output_dir / "replay_pnl.svg").write_text(
            reporting.polyline_svg(curves, "replay normalized P&L")
        )
    except CondorLabError as exc:
        _fail(exc)
    click.echo(f"replayed {len(results)} portfolios over {len(chains)} snapshots -> {out}")


@main.command("report")
@click.option("--sweep-dir", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory holding sweep_<axis>.csv output to re-render.")
@click.pass_context
def report_cmd(ctx, sweep_dir):
    """Re-render Markdown tables from previously emitted sweep CSVs."""
    import csv as _csv

    sweep_dir = Path(sweep_dir)
    rendered = 0
    for csv_path in sorted(sweep_dir.glob("sweep_*.csv")):
        with csv_path.open(newline="") as handle:
            table = list(_csv.reader(handle))
        widths = [max(len(r[j]) for r in table) for j in range(len(table[0]))]
        lines = []
        for i, cells in enumerate(table):
            lines.append("| " + " | ".join(c.rjust(w) for c, w in zip(cells, widths)) + " |")
            if i == 0:
                lines.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
        csv_path.with_suffix(".md").write_text("\n".join(lines) + "\n")
        rendered += 1
    if rendered == 0:
        _fail(ConfigError(f"no sweep_*.csv files under {sweep_dir}"))
    click.echo(f"re-rendered {rendered} tables under {sweep_dir}")


@main.command("make-fixtures")
@click.option("--dest", default="replay_fixtures", show_default=True,
              help="Directory to write the synthetic chain scenarios into.")
def make_fixtures_cmd(dest):
    """Write the bundled synthetic replay scenarios (bull, sideways, crash)."""
    written = fixtures.write_all_fixtures(dest)
    for name, path in written.items():
        click.echo(f"{name}: {path}")


if __name__ == "__main__":
    main()

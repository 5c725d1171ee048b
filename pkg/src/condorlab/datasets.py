"""Dataset-directory persistence for simulated artifacts.

A dataset directory holds a ``manifest.json`` (params, grid, seed, schema
version) next to per-matrix CSV files with header ``path_id,t0,t1,...``.
Floats are written with shortest round-trip repr, so load(save(x)) is
lossless.
"""

import csv
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .condor import CondorSpec, ValueTensor
from .pricer import PricingGrid
from .roughheston import ModelParams, PathBundle, SimGrid

FORMAT_VERSION = 1


def _write_matrix(path: Path, matrix: np.ndarray) -> None:
    matrix = np.atleast_2d(matrix)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["path_id"] + [f"t{j}" for j in range(matrix.shape[1])])
        for i, row in enumerate(matrix):
            writer.writerow([i] + [repr(float(x)) for x in row])


def _read_matrix(path: Path) -> np.ndarray:
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        next(reader)  # header
        rows = [[float(x) for x in row[1:]] for row in reader]
    return np.asarray(rows)


def _write_manifest(directory: Path, payload: dict) -> None:
    payload = {"format_version": FORMAT_VERSION, **payload}
    (directory / "manifest.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )


def _read_manifest(directory: Path) -> dict:
    return json.loads((directory / "manifest.json").read_text())


def save_bundle(bundle: PathBundle, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _write_manifest(directory, {
        "kind": "path_bundle",
        "params": asdict(bundle.params),
        "grid": asdict(bundle.grid),
    })
    _write_matrix(directory / "s.csv", bundle.s)
    _write_matrix(directory / "v.csv", bundle.v)
    _write_matrix(directory / "dw2.csv", bundle.dW2)
    return directory


def load_bundle(directory) -> PathBundle:
    directory = Path(directory)
    manifest = _read_manifest(directory)
    return PathBundle(
        s=_read_matrix(directory / "s.csv"),
        v=_read_matrix(directory / "v.csv"),
        dW2=_read_matrix(directory / "dw2.csv"),
        grid=SimGrid(**manifest["grid"]),
        params=ModelParams(**manifest["params"]),
    )


def _strike_tag(strike: float) -> str:
    return format(strike, ".6g").replace(".", "p").replace("-", "m")


def save_pricing_grid(grid: PricingGrid, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _write_manifest(directory, {
        "kind": "pricing_grid",
        "strikes": [repr(float(k)) for k in grid.strikes],
        "n_inner": grid.n_inner,
        "seed": grid.seed,
    })
    for ki, strike in enumerate(grid.strikes):
        tag = _strike_tag(strike)
        for kind_idx, kind in enumerate(("call", "put")):
            _write_matrix(directory / f"{kind}_{tag}.csv", grid.values[:, :, ki, kind_idx])
            _write_matrix(directory / f"{kind}_{tag}_se.csv",
                          grid.std_errors[:, :, ki, kind_idx])
    return directory


def load_pricing_grid(directory) -> PricingGrid:
    directory = Path(directory)
    manifest = _read_manifest(directory)
    strikes = np.array([float(k) for k in manifest["strikes"]])
    first = _read_matrix(directory / f"call_{_strike_tag(strikes[0])}.csv")
    values = np.empty(first.shape + (len(strikes), 2))
    ses = np.empty_like(values)
    for ki, strike in enumerate(strikes):
        tag = _strike_tag(strike)
        for kind_idx, kind in enumerate(("call", "put")):
            values[:, :, ki, kind_idx] = _read_matrix(directory / f"{kind}_{tag}.csv")
            ses[:, :, ki, kind_idx] = _read_matrix(directory / f"{kind}_{tag}_se.csv")
    return PricingGrid(values=values, std_errors=ses, strikes=strikes,
                       n_inner=manifest["n_inner"], seed=manifest["seed"])


def save_value_tensor(tensor: ValueTensor, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _write_manifest(directory, {
        "kind": "value_tensor",
        "specs": [asdict(spec) for spec in tensor.portfolio_specs],
    })
    for f in range(tensor.d.shape[2]):
        _write_matrix(directory / f"values_f{f}.csv", tensor.d[:, :, f])
    return directory


def load_value_tensor(directory) -> ValueTensor:
    directory = Path(directory)
    manifest = _read_manifest(directory)
    specs = [CondorSpec(**record) for record in manifest["specs"]]
    slices = [
        _read_matrix(directory / f"values_f{f}.csv") for f in range(len(specs) + 1)
    ]
    return ValueTensor(d=np.stack(slices, axis=2), portfolio_specs=specs)

"""CSV/JSON readers and writers for traces and sweep results.

Floats are written with ``repr``, which round-trips exactly.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError
from .sweep import SweepGrid, select_spi_optimal, best_mase
from .timeseries import TimeSeries

HEATMAP_COLUMNS = ["m", "tau", "spi", "mase"]


def fmt(x) -> str:
    """Round-trip decimal text for a float; empty for NaN/None."""
    if x is None:
        return ""
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def jsonable(x):
    """Recursively swap NaN for None and numpy scalars for Python ones."""
    if isinstance(x, dict):
        return {k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return None if math.isnan(x) else float(x)
    return x


def dump_json(obj, path=None) -> str:
    text = json.dumps(jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_timeseries_csv(path, name: str | None = None, sample_step: float = 1.0) -> TimeSeries:
    """Read one sample per line; a non-numeric first line is taken as a header."""
    values = []
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                if lineno == 1:
                    continue
                raise ParseError(f"cannot parse {text!r} as a number", lineno) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {text!r}", lineno)
            values.append(v)
    if len(values) < 2:
        raise ParseError(f"{path}: need at least 2 samples, found {len(values)}")
    return TimeSeries(np.array(values), sample_step=sample_step,
                      name=name or Path(path).stem, source="file")


def write_timeseries_csv(ts: TimeSeries, path, sidecar: dict | None = None):
    """Write ``value`` header plus one sample per line; optional JSON sidecar next to it."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write("value\n")
        fh.writelines(fmt(v) + "\n" for v in ts.values)
    if sidecar is not None:
        dump_json(sidecar, path.with_suffix(path.suffix + ".json"))


def write_heatmap_csv(grid: SweepGrid, path):
    """Long-form ``m,tau,spi,mase`` rows, m-major.

    An ``error`` column is appended only when some cells failed.
    """
    errors = {(m, t): msg for m, t, msg in grid.failures}
    header = HEATMAP_COLUMNS + (["error"] if errors else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, j, m, tau in grid.cells():
            row = [m, tau, fmt(grid.spi[i, j]),
                   fmt(grid.mase[i, j]) if grid.mase is not None else ""]
            if errors:
                row.append(errors.get((m, tau), ""))
            w.writerow(row)


def read_heatmap_csv(path, p: int = 1) -> SweepGrid:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ParseError(f"{path}: no data rows")
    m_values = sorted({int(r["m"]) for r in rows})
    tau_values = sorted({int(r["tau"]) for r in rows})
    spi = np.full((len(m_values), len(tau_values)), np.nan)
    mase = np.full_like(spi, np.nan)
    has_mase = any(r["mase"] for r in rows)
    failures = []
    for r in rows:
        i, j = m_values.index(int(r["m"])), tau_values.index(int(r["tau"]))
        if r["spi"]:
            spi[i, j] = float(r["spi"])
        if r["mase"]:
            mase[i, j] = float(r["mase"])
        if r.get("error"):
            failures.append((int(r["m"]), int(r["tau"]), r["error"]))
    return SweepGrid(m_values, tau_values, spi, mase if has_mase else None, p, failures)


def grid_summary(grid: SweepGrid, plateau_fraction: float) -> dict:
    """JSON-ready matrices plus argmax/argmin and the SPI selection."""
    out = {
        "m_values": grid.m_values,
        "tau_values": grid.tau_values,
        "p": grid.p,
        "spi": grid.spi,
        "failures": [{"m": m, "tau": t, "error": e} for m, t, e in grid.failures],
        "plateau_fraction": plateau_fraction,
    }
    if np.isfinite(grid.spi).any():
        sel = select_spi_optimal(grid, plateau_fraction)
        arg = select_spi_optimal(grid, 0.0)
        out["spi_argmax"] = {"m": arg.m, "tau": arg.tau, "value": arg.value}
        out["selection"] = {"m": sel.m, "tau": sel.tau, "value": sel.value, "rule": sel.rule}
    if grid.mase is not None:
        out["mase"] = grid.mase
        if np.isfinite(grid.mase).any():
            b = best_mase(grid)
            out["mase_argmin"] = {"m": b.m, "tau": b.tau, "value": b.value}
    return out

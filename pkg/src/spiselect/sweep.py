"""Exhaustive (m, tau) sweeps, SPI-optimal selection and related curves."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy import stats

from .errors import DataError, SpiError
from .forecast import TRAIN_FRACTION, ForecastConfig, rolling_forecast
from .infotheory import DEFAULT_K, DEFAULT_SEED, SpiRequest, spi
from .timeseries import ReconstructionParams, TimeSeries

PLATEAU_FRACTION = 0.05
ANTISYMMETRY_M_MIN = 3


@dataclass
class SweepGrid:
    """SPI (and optionally MASE) over ``m_values x tau_values``.

    Cells that could not be evaluated hold NaN and appear in ``failures`` as
    ``(m, tau, message)``.
    """

    m_values: list
    tau_values: list
    spi: np.ndarray
    mase: np.ndarray | None = None
    p: int = 1
    failures: list = field(default_factory=list)

    @property
    def shape(self):
        return len(self.m_values), len(self.tau_values)

    def cells(self):
        for i, m in enumerate(self.m_values):
            for j, tau in enumerate(self.tau_values):
                yield i, j, m, tau


@dataclass(frozen=True)
class Selection:
    m: int
    tau: int
    value: float
    rule: str


class HorizonPoint(NamedTuple):
    p: int
    m: int
    tau: int
    spi: float
    error: str | None = None


class LengthPoint(NamedTuple):
    length: int
    m: int
    spi: float
    error: str | None = None


def _map(fn, items, workers):
    if workers is None or workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def grid_sweep(ts: TimeSeries, m_values, tau_values, p: int = 1, compute_mase: bool = False,
               config: ForecastConfig | None = None, k: int = DEFAULT_K,
               n_train: int | None = None, n_test: int | None = None,
               workers: int = 1, seed: int = DEFAULT_SEED) -> SweepGrid:
    """Evaluate every ``(m, tau)`` cell; failures never abort the grid.

    When ``compute_mase`` is set each cell also runs the rolling forecast on
    one shared train/test split (90/10 unless ``n_train``/``n_test`` say
    otherwise). Results are placed by position, so the worker count does
    not change them.
    """
    m_values, tau_values = [int(m) for m in m_values], [int(t) for t in tau_values]
    if not m_values or not tau_values:
        raise DataError("m and tau ranges must be non-empty")
    if compute_mase:
        n_train = n_train or int(round(TRAIN_FRACTION * len(ts)))
        n_test = n_test or len(ts) - n_train

    def cell(mt):
        m, tau = mt
        try:
            params = ReconstructionParams(m, tau, p)
            s = spi(ts, SpiRequest(params, k, seed=seed)).value
            e = (rolling_forecast(ts, params, n_train, n_test, config).mase
                 if compute_mase else np.nan)
            return s, e, None
        except SpiError as exc:
            return np.nan, np.nan, f"{type(exc).__name__}: {exc}"

    todo = [(m, tau) for m in m_values for tau in tau_values]
    results = _map(cell, todo, workers)
    shape = (len(m_values), len(tau_values))
    spi_grid = np.array([r[0] for r in results], dtype=np.float64).reshape(shape)
    mase_grid = (np.array([r[1] for r in results], dtype=np.float64).reshape(shape)
                 if compute_mase else None)
    failures = [(m, tau, r[2]) for (m, tau), r in zip(todo, results) if r[2] is not None]
    return SweepGrid(m_values, tau_values, spi_grid, mase_grid, p, failures)


def select_spi_optimal(grid: SweepGrid, plateau_fraction: float = PLATEAU_FRACTION) -> Selection:
    """Lowest-``m`` cell (then lowest ``tau``) among those near the SPI maximum.

    The plateau is every cell within ``plateau_fraction`` of the maximum.
    ``rule`` is ``"global_argmax"`` when the chosen cell is the maximum
    itself and ``"plateau_min_m"`` when the plateau rule moved the choice.
    """
    s = np.asarray(grid.spi, dtype=np.float64)
    ok = np.isfinite(s)
    if not ok.any():
        raise DataError("every cell in the grid failed")
    best = s[ok].max()
    cutoff = best - plateau_fraction * abs(best)
    # C order over (m, tau) is already "smallest m, then smallest tau"
    i_arg, j_arg = np.unravel_index(np.flatnonzero(ok & (s == best))[0], s.shape)
    i_sel, j_sel = np.unravel_index(np.flatnonzero(ok & (s >= cutoff))[0], s.shape)
    rule = "global_argmax" if (i_sel, j_sel) == (i_arg, j_arg) else "plateau_min_m"
    return Selection(grid.m_values[i_sel], grid.tau_values[j_sel], float(s[i_sel, j_sel]), rule)


def best_mase(grid: SweepGrid) -> Selection:
    """Exhaustive-search optimum: the cell with the lowest MASE."""
    if grid.mase is None:
        raise DataError("grid has no MASE values")
    e = np.where(np.isfinite(grid.mase), grid.mase, np.inf)
    if not np.isfinite(e).any():
        raise DataError("every MASE cell failed")
    i, j = np.unravel_index(np.argmin(e), e.shape)
    return Selection(grid.m_values[i], grid.tau_values[j], float(e[i, j]), "global_argmin")


def mase_at(grid: SweepGrid, m: int, tau: int) -> float:
    return float(grid.mase[grid.m_values.index(m), grid.tau_values.index(tau)])


def antisymmetry_score(grid: SweepGrid, m_min_for_region: int = ANTISYMMETRY_M_MIN) -> float:
    """Spearman correlation of SPI against MASE over cells with ``m >= m_min``.

    Strongly negative values mean higher SPI goes with lower forecast
    error. Low-``m`` rows are left out because projection and overfolding
    break the relationship there.
    """
    if grid.mase is None:
        raise DataError("antisymmetry needs a grid with MASE values")
    rows = np.array(grid.m_values) >= m_min_for_region
    s, e = grid.spi[rows].ravel(), grid.mase[rows].ravel()
    ok = np.isfinite(s) & np.isfinite(e)
    if ok.sum() < 10:
        raise DataError(f"need at least 10 cells with m >= {m_min_for_region}, have {ok.sum()}")
    return float(stats.spearmanr(s[ok], e[ok])[0])


def horizon_curves(ts: TimeSeries, p_values, m_values, tau_values, k: int = DEFAULT_K,
                   workers: int = 1, seed: int = DEFAULT_SEED) -> list[HorizonPoint]:
    """SPI over ``p x m x tau`` in long form.

    Fix ``m`` and sweep ``tau`` (or the other way round) by passing a
    single-element list for the fixed parameter.
    """
    todo = [(p, m, t) for p in p_values for m in m_values for t in tau_values]

    def point(pmt):
        p, m, t = pmt
        try:
            return HorizonPoint(p, m, t, spi(ts, SpiRequest(ReconstructionParams(m, t, p), k, seed=seed)).value)
        except SpiError as exc:
            return HorizonPoint(p, m, t, float("nan"), f"{type(exc).__name__}: {exc}")

    return _map(point, todo, workers)


def data_length_curve(source, lengths, m_values, tau: int = 1, p: int = 1,
                      k: int = DEFAULT_K, workers: int = 1,
                      seed: int = DEFAULT_SEED) -> list[LengthPoint]:
    """SPI as a function of how much data is available.

    ``source`` is either a series, whose prefixes are used, or a callable
    ``length -> TimeSeries`` that produces a trace of each length.
    """
    lengths = [int(n) for n in lengths]
    if lengths != sorted(lengths):
        raise DataError("lengths must be ascending")
    make: Callable[[int], TimeSeries]
    if isinstance(source, TimeSeries):
        if lengths and lengths[-1] > len(source):
            raise DataError(f"series has {len(source)} samples, longest request is {lengths[-1]}")
        make = source.head
    else:
        make = source
    traces = {n: make(n) for n in lengths}
    todo = [(n, m) for n in lengths for m in m_values]

    def point(nm):
        n, m = nm
        try:
            return LengthPoint(n, m, spi(traces[n], SpiRequest(ReconstructionParams(m, tau, p), k, seed=seed)).value)
        except SpiError as exc:
            return LengthPoint(n, m, float("nan"), f"{type(exc).__name__}: {exc}")

    return _map(point, todo, workers)

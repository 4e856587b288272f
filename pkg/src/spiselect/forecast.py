"""Method-of-analogues forecasting and MASE scoring.

The forecaster looks up the nearest past delay vector(s) under the max norm
and reads off what followed them. ``rolling_forecast`` walks through a test
segment, at every step using only samples that would have been observed by
then.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, InvalidSplitError, NoValidNeighborsError, ZeroDenominatorError
from .neighbors import NeighborIndex
from .timeseries import DelayMatrix, ReconstructionParams, TimeSeries, delay_vectors

HORIZON_MODES = ("direct_p_step", "rolling_one_step")
TRAIN_FRACTION = 0.9
_BATCH = 400


@dataclass(frozen=True)
class ForecastConfig:
    """Forecaster settings.

    ``exclusion_window=None`` means ``(m - 1) * tau + p``: candidate rows whose
    base index lies closer than that to the query's are never used as
    analogues. A window of 0 excludes nothing.
    ``horizon_mode`` only matters for ``p > 1``: ``direct_p_step`` reads the
    analogue's value ``p`` samples on, ``rolling_one_step`` chains ``p``
    one-step predictions.
    """

    num_neighbors: int = 1
    exclusion_window: int | None = None
    rebuild_every_step: bool = True
    horizon_mode: str = "direct_p_step"

    def __post_init__(self):
        if self.num_neighbors < 1:
            raise DataError("num_neighbors must be >= 1")
        if self.exclusion_window is not None and self.exclusion_window < 0:
            raise DataError("exclusion_window must be >= 0")
        if self.horizon_mode not in HORIZON_MODES:
            raise DataError(f"unknown horizon_mode {self.horizon_mode!r}")

    def window(self, params: ReconstructionParams) -> int:
        if self.exclusion_window is not None:
            return self.exclusion_window
        return params.span + params.p


@dataclass(frozen=True)
class ForecastResult:
    predictions: np.ndarray
    truth: np.ndarray
    mase: float
    params: ReconstructionParams
    config: ForecastConfig


def mase(predictions, truth, train) -> float:
    """Mean absolute error scaled by the in-sample random-walk error.

    ``sum |pred - truth| / ((k / (n - 1)) * sum |train[j] - train[j-1]|)``
    """
    pred = np.asarray(predictions, dtype=np.float64)
    true = np.asarray(truth, dtype=np.float64)
    train = np.asarray(train, dtype=np.float64)
    if pred.shape != true.shape or pred.ndim != 1 or len(pred) < 1:
        raise DataError("predictions and truth must be equal-length non-empty vectors")
    if len(train) < 2:
        raise DataError("training signal needs at least 2 samples")
    steps = np.abs(np.diff(train)).sum()
    if steps == 0:
        raise ZeroDenominatorError("constant training signal: MASE is undefined")
    k, n = len(pred), len(train)
    return float(np.abs(pred - true).sum() / ((k / (n - 1)) * steps))


def lma_predict_next(matrix: DelayMatrix, query, query_base_index: int,
                     config: ForecastConfig | None = None,
                     index: NeighborIndex | None = None) -> float:
    """Average target of the nearest admissible analogue(s) of ``query``.

    Rows whose base index lies less than the exclusion window away from
    ``query_base_index`` are skipped. Pass a prebuilt ``index`` over
    ``matrix.vectors`` to avoid rebuilding it on every call.
    """
    config = config or ForecastConfig()
    w = config.window(matrix.params)
    base = matrix.base_indices
    excluded = np.flatnonzero(np.abs(base - query_base_index) < w)
    available = len(matrix) - len(excluded)
    if available < 1:
        raise NoValidNeighborsError("the exclusion window removed every candidate analogue")
    index = index or NeighborIndex(matrix.vectors)
    hits = index.knn(query, min(config.num_neighbors, available), exclude=excluded)
    return float(np.mean(matrix.targets[[i for i, _ in hits]]))


def _nearest_in_batch(vectors, static_rows, queries, limits, k):
    """Ids of the ``k`` nearest rows ``r <= limits[i]`` for every query.

    Rows ``0..static_rows-1`` are admissible for every query and searched
    with a tree; the few rows above them are scanned directly.
    """
    index = NeighborIndex(vectors[:static_rows])
    s_ids, s_d = index.knn_batch(queries, min(k, static_rows))
    top = int(limits.max()) + 1
    if top <= static_rows:
        return s_ids
    grow = vectors[static_rows:top]
    grow_ids = np.arange(static_rows, top)
    d = np.abs(queries[:, None, :] - grow[None, :, :]).max(axis=2)
    d[grow_ids[None, :] > limits[:, None]] = np.inf
    kk = min(k, d.shape[1])
    if kk < d.shape[1]:
        part = np.argpartition(d, kk - 1, axis=1)[:, :kk]
    else:
        part = np.broadcast_to(np.arange(d.shape[1]), d.shape)
    ids = np.hstack([s_ids, grow_ids[part]])
    dist = np.hstack([s_d, np.take_along_axis(d, part, axis=1)])
    order = np.lexsort((ids, dist), axis=1)[:, :k]
    out = np.take_along_axis(ids, order, axis=1)
    chosen = np.take_along_axis(dist, order, axis=1)
    if not np.isfinite(chosen).all():
        raise NoValidNeighborsError("not enough admissible analogues for a query")
    # argpartition may drop an equally distant row with a lower id
    tied = (d <= chosen[:, -1:]).sum(axis=1) > kk
    for r in np.flatnonzero(tied):
        ok = np.isfinite(d[r])
        cand = np.concatenate([s_ids[r], grow_ids[ok]])
        cd = np.concatenate([s_d[r], d[r][ok]])
        out[r] = cand[np.lexsort((cand, cd))[:k]]
    return out


def _nearest_rows(vectors, queries, limits, k):
    """Ids of the ``k`` nearest rows ``r <= limits[i]``; ``limits`` non-decreasing.

    Queries are taken in batches; each batch gets a tree over the rows every
    member may use, so the growing library never needs a tree per step.
    """
    out = np.empty((len(queries), k), dtype=np.int64)
    for a in range(0, len(queries), _BATCH):
        lim = limits[a:a + _BATCH]
        static_rows = int(lim.min()) + 1
        if static_rows < k:
            raise NoValidNeighborsError(f"fewer than {k} admissible analogues for a forecast")
        out[a:a + _BATCH] = _nearest_in_batch(vectors, static_rows, queries[a:a + _BATCH], lim, k)
    return out


def _analogue_forecast(x, m, tau, p, first_q, last_q, limits, k, queries=None):
    """Predict ``x[q + p]`` for ``q = first_q..last_q`` from rows with base <= limit."""
    span = (m - 1) * tau
    first_row_base = span
    limit_rows = limits - first_row_base
    if limit_rows.min() < 0:
        raise NoValidNeighborsError("no admissible analogues before the first forecast")
    needed = int(limit_rows.max()) + 1
    vectors = delay_vectors(x, m, tau, first_row_base, first_row_base + needed - 1)
    targets = x[np.arange(first_row_base, first_row_base + needed) + p]
    if queries is None:
        queries = delay_vectors(x, m, tau, first_q, last_q)
    ids = _nearest_rows(vectors, queries, limit_rows, k)
    return targets[ids].mean(axis=1)


def rolling_forecast(ts, params: ReconstructionParams, n: int | None = None,
                     k: int | None = None, config: ForecastConfig | None = None) -> ForecastResult:
    """Forecast samples ``n .. n+k-1`` (0-based) one at a time and score them.

    The forecast of sample ``i`` uses the delay vector ending at ``i - p``
    and analogues whose continuation was already observed at that time,
    minus the exclusion window. With ``rebuild_every_step=False`` the
    analogue library is frozen at the training segment. Defaults put 90% of
    the series in training and the rest in the test segment.
    """
    config = config or ForecastConfig()
    x = ts.values if isinstance(ts, TimeSeries) else np.asarray(ts, dtype=np.float64)
    if n is None:
        n = int(round(TRAIN_FRACTION * len(x)))
    if k is None:
        k = len(x) - n
    if n < 2 or k < 1 or n + k > len(x):
        raise InvalidSplitError(f"need n >= 2, k >= 1 and n + k <= {len(x)}; got n={n}, k={k}")
    m, tau, p = params.m, params.tau, params.p
    span = params.span
    if n - p < span:
        raise DataError(f"training segment too short for m={m}, tau={tau}, p={p}")
    x = x[:n + k]
    q = np.arange(n, n + k) - p
    nn = config.num_neighbors

    if p == 1 or config.horizon_mode == "direct_p_step":
        w = config.window(params)
        limits = np.minimum(q - p, q - w)
        if not config.rebuild_every_step:
            limits = np.minimum(limits, n - 1 - p)
        pred = _analogue_forecast(x, m, tau, p, q[0], q[-1], limits, nn)
    else:
        # chain one-step forecasts; the library is fixed at the last true sample
        one = ReconstructionParams(m, tau, 1)
        w = config.window(one)
        limits = np.minimum(q - 1, q - w)
        if not config.rebuild_every_step:
            limits = np.minimum(limits, n - 2)
        buf = np.empty((k, span + 1 + p))
        buf[:, :span + 1] = x[q[:, None] + np.arange(-span, 1)[None, :]]
        lags = tau * np.arange(m)
        for s in range(p):
            newest = span + s
            queries = buf[:, newest - lags]
            buf[:, newest + 1] = _analogue_forecast(x, m, tau, 1, 0, 0, limits, nn,
                                                    queries=queries)
        pred = buf[:, -1].copy()
    truth = x[n:n + k].copy()
    return ForecastResult(pred, truth, mase(pred, truth, x[:n]), params, config)

"""Classical reconstruction heuristics used as baselines.

* delay: first clear minimum of the histogram time-delayed mutual
  information (Fraser & Swinney);
* dimension: false nearest neighbours (Kennel, Brown & Abarbanel).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import SeriesTooShortError
from .timeseries import TimeSeries, delay_vectors

AMI_BINS = 32
AMI_MIN_RISE = 0.01
FNN_RTOL = 15.0
FNN_ATOL = 2.0
FNN_THRESHOLD = 0.01


@dataclass(frozen=True)
class HeuristicResult:
    value: int | None
    diagnostic_curve: list = field(default_factory=list)
    status: str = "ok"

    @property
    def ok(self):
        return self.status == "ok"


def _values(ts):
    return ts.values if isinstance(ts, TimeSeries) else np.asarray(ts, dtype=np.float64)


def histogram_mi(a, b, edges) -> float:
    """Plug-in mutual information (nats) of two samples on a shared grid."""
    h, _, _ = np.histogram2d(a, b, bins=[edges, edges])
    pxy = h / h.sum()
    px, py = pxy.sum(axis=1), pxy.sum(axis=0)
    nz = pxy > 0
    return float(np.sum(pxy[nz] * np.log(pxy[nz] / np.outer(px, py)[nz])))


def ami_curve(ts, tau_max: int, bins: int = AMI_BINS):
    """``[(tau, I[x_j; x_{j-tau}]), ...]`` for ``tau = 1..tau_max``.

    Bins are equal-width over the observed range of the whole series.
    """
    x = _values(ts)
    if tau_max < 1 or len(x) <= tau_max + 1:
        raise SeriesTooShortError(f"series of length {len(x)} too short for tau_max={tau_max}")
    lo, hi = x.min(), x.max()
    if hi == lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, bins + 1)
    return [(tau, histogram_mi(x[tau:], x[:-tau], edges)) for tau in range(1, tau_max + 1)]


def ami_first_minimum_tau(ts, tau_max: int = 100, bins: int = AMI_BINS,
                          min_rise: float = AMI_MIN_RISE) -> HeuristicResult:
    """Smallest tau at a clear strict local minimum of the AMI curve.

    A strict local minimum only counts if the curve climbs again, somewhere
    before ``tau_max``, by at least ``min_rise`` times the curve's total
    range. Curves that decay into estimator noise (typical for maps) wiggle
    without ever doing so, and the result is ``status="failed"``.
    """
    if tau_max < 2 or bins < 2:
        raise ValueError("need tau_max >= 2 and bins >= 2")
    curve = ami_curve(ts, tau_max, bins)
    c = np.array([v for _, v in curve])
    spread = c.max() - c.min()
    for i in range(1, len(c) - 1):
        if c[i] < c[i - 1] and c[i] < c[i + 1] and c[i + 1:].max() - c[i] >= min_rise * spread:
            return HeuristicResult(i + 1, curve, "ok")
    return HeuristicResult(None, curve, "failed")


def fnn_fraction(x, m: int, tau: int, rtol: float = FNN_RTOL, atol: float = FNN_ATOL) -> float:
    """Fraction of max-norm nearest neighbours in dimension ``m`` that are false.

    A neighbour is false when adding the ``(m+1)``-th delay coordinate
    stretches the pair by more than ``rtol`` times their ``m``-dimensional
    distance, or leaves them further apart than ``atol`` standard
    deviations of the series.
    """
    x = np.asarray(x, dtype=np.float64)
    first, last = m * tau, len(x) - 1
    if last - first < 1:
        raise SeriesTooShortError(f"series too short for m={m + 1}, tau={tau}")
    emb = delay_vectors(x, m, tau, first, last)
    extra = x[np.arange(first, last + 1) - m * tau]
    d, idx = cKDTree(emb).query(emb, 2, p=np.inf)
    rows = np.arange(len(emb))
    # with duplicate vectors the row itself need not be listed first
    nn = np.where(idx[:, 0] == rows, idx[:, 1], idx[:, 0])
    dist = d[:, 1]
    grow = np.abs(extra - extra[nn])
    with np.errstate(divide="ignore", invalid="ignore"):
        relative = np.where(dist > 0, grow / dist > rtol, grow > 0)
    absolute = np.maximum(dist, grow) > atol * x.std()
    return float(np.mean(relative | absolute))


def fnn_dimension(ts, tau: int, m_max: int = 15, rtol: float = FNN_RTOL,
                  atol: float = FNN_ATOL, threshold: float = FNN_THRESHOLD) -> HeuristicResult:
    """Smallest ``m`` whose false-neighbour fraction drops below ``threshold``."""
    if m_max < 2:
        raise ValueError("need m_max >= 2")
    x = _values(ts)
    if m_max * tau >= len(x) - 1:
        raise SeriesTooShortError(f"series of length {len(x)} too short for m_max={m_max}, tau={tau}")
    curve = []
    for m in range(1, m_max + 1):
        frac = fnn_fraction(x, m, tau, rtol, atol)
        curve.append((m, frac))
        if frac < threshold:
            return HeuristicResult(m, curve, "ok")
    return HeuristicResult(None, curve, "failed")

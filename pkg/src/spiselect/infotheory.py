"""Nearest-neighbour information estimators and SPI.

All quantities are in nats. The main estimator is Kraskov-Stoegbauer-
Grassberger algorithm 2 under the max norm; a fixed-bandwidth box kernel
and a Kozachenko-Leonenko entropy estimator are provided alongside.

SPI for a reconstruction ``(m, tau, p)`` is the mutual information between
each delay vector and the observation ``p`` samples after its newest
coordinate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.spatial import cKDTree

from .errors import DataError, DegenerateDataError, NumericalError, TooFewSamplesError
from .neighbors import self_counts
from .timeseries import ReconstructionParams, build_delay_vectors

DEFAULT_K = 4
DEFAULT_SEED = 42
JITTER = 1e-10

ESTIMATORS = ("ksg2", "box_kernel")


@dataclass(frozen=True)
class MIEstimate:
    value: float
    estimator: str
    k_or_r: float
    n_samples: int

    @property
    def bits(self):
        return self.value / np.log(2.0)


@dataclass(frozen=True)
class SpiRequest:
    params: ReconstructionParams
    k: int = DEFAULT_K
    estimator: str = "ksg2"
    bandwidth: float | None = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.k < 1:
            raise DataError("k must be >= 1")
        if self.estimator not in ESTIMATORS:
            raise DataError(f"unknown estimator {self.estimator!r}")
        if self.estimator == "box_kernel" and not (self.bandwidth or 0) > 0:
            raise DataError("box_kernel needs a positive bandwidth")


def digamma(x):
    """psi(x) for x > 0 (scalar or array)."""
    a = np.asarray(x, dtype=np.float64)
    if (a <= 0).any():
        raise DataError("digamma is only defined here for positive arguments")
    out = special.digamma(a)
    return float(out) if out.ndim == 0 else out


def _as_2d(a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise DataError("samples must be a vector or an R x d matrix")
    return a


def _paired(X, Y):
    X, Y = _as_2d(X), _as_2d(Y)
    if len(X) != len(Y):
        raise DataError(f"X has {len(X)} rows but Y has {len(Y)}")
    if not (np.isfinite(X).all() and np.isfinite(Y).all()):
        raise DataError("non-finite sample")
    return X, Y


def jitter_duplicates(Z, seed=DEFAULT_SEED):
    """Break exact duplicate rows with noise of size ``1e-10 * range`` per column.

    Returned unchanged (same object) when all rows are distinct.
    """
    Z = _as_2d(Z)
    if len(np.unique(Z, axis=0)) == len(Z):
        return Z
    span = np.ptp(Z, axis=0)
    if not (span > 0).any():
        raise DegenerateDataError("all samples are identical")
    span = np.where(span > 0, span, span.max())
    rng = np.random.default_rng(seed)
    return Z + JITTER * span * rng.uniform(-1.0, 1.0, size=Z.shape)


def _knn_excluding_self(Z, k):
    """Indices and distances of the ``k`` nearest other rows of ``Z``."""
    d, idx = cKDTree(Z).query(Z, k + 1, p=np.inf)
    rows = np.arange(len(Z))
    if (idx[:, 0] == rows).all():
        return idx[:, 1:], d[:, 1:]
    # self is not guaranteed to come first when another row sits at distance 0
    nb = np.empty((len(Z), k), dtype=idx.dtype)
    nd = np.empty((len(Z), k))
    for r in range(len(Z)):
        keep = idx[r] != r
        nb[r] = idx[r][keep][:k]
        nd[r] = d[r][keep][:k]
    return nb, nd


def _marginal_counts(A, radii):
    """Points within (or on) ``radii`` of each row of ``A``, self excluded."""
    return self_counts(A, radii) - 1


def ksg_mi(X, Y, k: int = DEFAULT_K, seed: int = DEFAULT_SEED) -> MIEstimate:
    """KSG algorithm 2 estimate of I[X;Y].

    For each sample the ``k`` nearest joint-space neighbours are found under
    the max norm (the joint distance is the larger of the two marginal
    distances). The marginal radii are the largest marginal distances among
    those ``k`` neighbours, and ``n_x``, ``n_y`` count the other samples
    within or on those radii. The estimate is
    ``psi(k) - 1/k - <psi(n_x) + psi(n_y)> + psi(N)``.
    """
    X, Y = _paired(X, Y)
    n = len(X)
    if k < 1:
        raise DataError("k must be >= 1")
    if n <= k:
        raise TooFewSamplesError(f"KSG needs more than k={k} samples, got {n}")
    Z = jitter_duplicates(np.hstack([X, Y]), seed)
    dx = X.shape[1]
    X, Y = Z[:, :dx], Z[:, dx:]
    nb, _ = _knn_excluding_self(Z, k)
    rx = np.abs(X[:, None, :] - X[nb]).max(axis=(1, 2))
    ry = np.abs(Y[:, None, :] - Y[nb]).max(axis=(1, 2))
    nx = np.maximum(_marginal_counts(X, rx), 1)
    ny = np.maximum(_marginal_counts(Y, ry), 1)
    # sum in index order so the result does not depend on how work was split
    local = special.digamma(nx) + special.digamma(ny)
    value = special.digamma(k) - 1.0 / k - np.add.reduce(local) / n + special.digamma(n)
    return MIEstimate(float(value), "ksg2", k, n)


def box_kernel_mi(X, Y, r: float) -> MIEstimate:
    """Fixed-bandwidth step-kernel estimate of I[X;Y].

    Each probability is the fraction of samples (the sample itself
    included) within max-norm distance ``r``; the local log ratio
    ``log p(x,y) / (p(x) p(y))`` is averaged over samples.
    """
    X, Y = _paired(X, Y)
    n = len(X)
    if n < 2:
        raise TooFewSamplesError("box kernel needs at least 2 samples")
    if not r > 0:
        raise DataError("bandwidth must be positive")
    Z = np.hstack([X, Y])
    cj = cKDTree(Z).query_ball_point(Z, r, p=np.inf, return_length=True)
    cx = cKDTree(X).query_ball_point(X, r, p=np.inf, return_length=True)
    cy = cKDTree(Y).query_ball_point(Y, r, p=np.inf, return_length=True)
    if (cx == 0).any() or (cy == 0).any():
        raise NumericalError("zero marginal probability in box kernel")
    local = np.log(cj) + np.log(n) - np.log(cx) - np.log(cy)
    return MIEstimate(float(np.add.reduce(local) / n), "box_kernel", float(r), n)


def knn_entropy(X, k: int = DEFAULT_K, seed: int = DEFAULT_SEED) -> float:
    """Kozachenko-Leonenko differential entropy (nats), max-norm balls."""
    X = _as_2d(X)
    n, d = X.shape
    if k < 1:
        raise DataError("k must be >= 1")
    if n <= k:
        raise TooFewSamplesError(f"entropy estimate needs more than k={k} samples, got {n}")
    X = jitter_duplicates(X, seed)
    _, dist = _knn_excluding_self(X, k)
    eps = dist[:, -1]
    if (eps <= 0).any():
        raise DegenerateDataError("zero nearest-neighbour distance")
    return float(special.digamma(n) - special.digamma(k)
                 + d * np.add.reduce(np.log(2.0 * eps)) / n)


def spi(ts, req) -> MIEstimate:
    """Shared information between delay vectors and their ``p``-step future.

    ``req`` is a :class:`SpiRequest`, or a bare
    :class:`~spiselect.timeseries.ReconstructionParams` for the defaults
    (KSG, k=4).
    """
    if isinstance(req, ReconstructionParams):
        req = SpiRequest(req)
    dm = build_delay_vectors(ts, req.params)
    if req.estimator == "box_kernel":
        return box_kernel_mi(dm.vectors, dm.targets, req.bandwidth)
    return ksg_mi(dm.vectors, dm.targets, req.k, req.seed)


def r_of_p(ts, params: ReconstructionParams, p_max: int, k: int = DEFAULT_K):
    """Fraction of future uncertainty explained, ``SPI(p) / H[X_{j+p}]``.

    Returns ``[(p, ratio), ...]`` for ``p = 1..p_max``. Horizons where the
    entropy estimate is not positive have no meaningful ratio; they are left
    out and reported through a ``RuntimeWarning``.
    """
    out, skipped = [], []
    for p in range(1, p_max + 1):
        dm = build_delay_vectors(ts, ReconstructionParams(params.m, params.tau, p))
        h = knn_entropy(dm.targets, k)
        if h <= 0:
            skipped.append(p)
            continue
        out.append((p, ksg_mi(dm.vectors, dm.targets, k).value / h))
    if skipped:
        warnings.warn(f"non-positive entropy estimate, ratio omitted for p={skipped}",
                      RuntimeWarning, stacklevel=2)
    return out


def co_information(X, Y, Z, k: int = DEFAULT_K) -> float:
    """I[X;Y;Z] = I[X;Z] + I[Y;Z] - I[(X,Y);Z]. Diagnostic only."""
    X, Y, Z = _as_2d(X), _as_2d(Y), _as_2d(Z)
    return (ksg_mi(X, Z, k).value + ksg_mi(Y, Z, k).value
            - ksg_mi(np.hstack([X, Y]), Z, k).value)


def multi_information(X, Y, Z, k: int = DEFAULT_K) -> float:
    """H[X] + H[Y] + H[Z] - H[X,Y,Z] = I[X;Y] + I[(X,Y);Z]. Diagnostic only."""
    X, Y, Z = _as_2d(X), _as_2d(Y), _as_2d(Z)
    return ksg_mi(X, Y, k).value + ksg_mi(np.hstack([X, Y]), Z, k).value

"""Scalar series containers and delay-coordinate reconstruction."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import DataError, InvalidSplitError, SeriesTooShortError


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TimeSeries:
    """A uniformly sampled scalar signal.

    ``values`` is copied and made read-only on construction, so instances
    can be shared between workers without defensive copies.
    """

    values: np.ndarray
    sample_step: float = 1.0
    name: str = ""
    source: str = "synthetic"

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 1:
            raise DataError("time series must be one-dimensional")
        if len(v) < 2:
            raise DataError("time series needs at least 2 samples")
        bad = np.flatnonzero(~np.isfinite(v))
        if bad.size:
            raise DataError(f"non-finite sample at index {bad[0]}")
        if not self.sample_step > 0:
            raise DataError("sample_step must be positive")
        if self.source not in ("synthetic", "file"):
            raise DataError(f"unknown source {self.source!r}")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)

    def head(self, n: int) -> TimeSeries:
        """The first ``n`` samples as a new series."""
        if not 2 <= n <= len(self):
            raise DataError(f"cannot take a prefix of length {n} from {len(self)} samples")
        return replace(self, values=self.values[:n])


@dataclass(frozen=True)
class ReconstructionParams:
    """Embedding dimension ``m``, delay ``tau`` and horizon ``p``."""

    m: int
    tau: int = 1
    p: int = 1

    def __post_init__(self):
        for name in ("m", "tau", "p"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise DataError(f"{name} must be an integer >= 1, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def span(self) -> int:
        """Samples reaching back from the newest delay coordinate."""
        return (self.m - 1) * self.tau

    def n_rows(self, n: int) -> int:
        return n - self.span - self.p

    def check_length(self, n: int):
        if self.span + self.p >= n:
            raise SeriesTooShortError(
                f"(m-1)*tau + p = {self.span + self.p} must be < series length {n}; "
                "reduce m, tau or p"
            )


@dataclass(frozen=True)
class DelayMatrix:
    """Aligned delay vectors and their ``p``-step-ahead targets.

    Row ``r`` holds ``[x[j], x[j-tau], ..., x[j-(m-1)tau]]`` with
    ``j = base_indices[r]`` and ``targets[r] = x[j+p]`` (0-based).
    """

    vectors: np.ndarray
    targets: np.ndarray
    params: ReconstructionParams
    base_indices: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.targets)


def delay_vectors(x, m: int, tau: int, first: int, last: int) -> np.ndarray:
    """Delay vectors for base indices ``first..last`` inclusive."""
    base = np.arange(first, last + 1)
    cols = base[:, None] - tau * np.arange(m)[None, :]
    return np.asarray(x)[cols]


def build_delay_vectors(ts, params: ReconstructionParams) -> DelayMatrix:
    x = ts.values if isinstance(ts, TimeSeries) else np.asarray(ts, dtype=np.float64)
    n = len(x)
    params.check_length(n)
    first, last = params.span, n - 1 - params.p
    base = np.arange(first, last + 1)
    vectors = delay_vectors(x, params.m, params.tau, first, last)
    targets = x[base + params.p]
    for a in (vectors, targets, base):
        a.setflags(write=False)
    return DelayMatrix(vectors, targets, params, base)


def split_train_test(ts: TimeSeries, n: int, k: int) -> tuple[TimeSeries, TimeSeries]:
    """First ``n`` samples for training, the following ``k`` for testing."""
    if n < 2 or k < 1 or n + k > len(ts):
        raise InvalidSplitError(
            f"need n >= 2, k >= 1 and n + k <= {len(ts)}; got n={n}, k={k}"
        )
    train = replace(ts, values=ts.values[:n])
    # a one-sample test segment is legal here, so skip the length check
    test = object.__new__(TimeSeries)
    for f in fields(TimeSeries):
        object.__setattr__(test, f.name, getattr(ts, f.name))
    object.__setattr__(test, "values", _frozen(ts.values[n:n + k]))
    return train, test


def affine_transform(ts: TimeSeries, scale: float, offset: float = 0.0) -> TimeSeries:
    if not scale > 0:
        raise DataError("scale must be positive")
    return replace(ts, values=scale * ts.values + offset)

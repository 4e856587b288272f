"""Exact max-norm neighbour queries.

A thin layer over :class:`scipy.spatial.cKDTree` (``p=inf``) that adds the
guarantees the estimators rely on: exclusion sets, inclusive/exclusive
radius counts, and distance ties broken by lower point id.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .errors import DataError

CHEB = np.inf


def max_norm(a, b):
    return np.abs(np.asarray(a) - np.asarray(b)).max(axis=-1)


class NeighborIndex:
    """Immutable index over an ``R x d`` point set (duplicates kept)."""

    def __init__(self, points):
        pts = np.array(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise DataError("neighbour index needs a non-empty R x d array")
        if not np.isfinite(pts).all():
            raise DataError("non-finite coordinate in neighbour index input")
        pts.setflags(write=False)
        self.points = pts
        self._tree = cKDTree(pts, balanced_tree=False, compact_nodes=False)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def _as_query(self, q):
        q = np.asarray(q, dtype=np.float64).reshape(-1)
        if q.shape[0] != self.dim:
            raise DataError(f"query has dimension {q.shape[0]}, index has {self.dim}")
        return q

    def knn(self, query, k: int, exclude=()):
        """The ``k`` nearest points as ``[(id, distance), ...]`` ascending."""
        q = self._as_query(query)
        exclude = set(int(i) for i in exclude)
        n_avail = len(self) - len([i for i in exclude if 0 <= i < len(self)])
        if k < 1 or k > n_avail:
            raise DataError(f"k={k} is out of range for {n_avail} available points")
        kk = min(k + len(exclude), len(self))
        d, idx = self._tree.query(q, kk, p=CHEB)
        d, idx = np.atleast_1d(d), np.atleast_1d(idx)
        keep = [j for j, i in enumerate(idx) if i not in exclude]
        radius = d[keep[k - 1]]
        # everything at or inside the k-th distance, so ties resolve by id
        cand = np.array(self._tree.query_ball_point(q, radius, p=CHEB), dtype=np.int64)
        cand = cand[[i not in exclude for i in cand]]
        dist = max_norm(self.points[cand], q)
        order = np.lexsort((cand, dist))[:k]
        return [(int(cand[o]), float(dist[o])) for o in order]

    def knn_batch(self, queries, k: int):
        """Vectorised ``knn`` without exclusions; returns ``(ids, dists)`` arrays."""
        q = np.asarray(queries, dtype=np.float64)
        if k < 1 or k > len(self):
            raise DataError(f"k={k} is out of range for {len(self)} points")
        kk = min(k + 1, len(self))
        d, idx = self._tree.query(q, kk, p=CHEB)
        d, idx = d.reshape(len(q), kk), idx.reshape(len(q), kk)
        ids, dists = idx[:, :k].copy(), d[:, :k].copy()
        # rows where the boundary distance is shared may need re-ordering
        if kk > k:
            suspect = (d[:, k] == d[:, k - 1]) | (np.diff(d[:, :k], axis=1) == 0).any(axis=1)
        else:
            suspect = (np.diff(d, axis=1) == 0).any(axis=1)
        for r in np.flatnonzero(suspect):
            res = self.knn(q[r], k)
            ids[r] = [i for i, _ in res]
            dists[r] = [v for _, v in res]
        return ids, dists

    def count_within(self, query, radius: float, inclusive: bool = True, exclude=()) -> int:
        q = self._as_query(query)
        if radius < 0:
            raise DataError("radius must be non-negative")
        if not inclusive:
            if radius == 0:
                return 0
            radius = np.nextafter(radius, -np.inf)
        hits = self._tree.query_ball_point(q, radius, p=CHEB)
        if exclude:
            ex = set(int(i) for i in exclude)
            return sum(1 for i in hits if i not in ex)
        return len(hits)

    def count_within_batch(self, queries, radii, inclusive: bool = True) -> np.ndarray:
        """Counts for many queries at once, no exclusions (self included)."""
        q = np.asarray(queries, dtype=np.float64)
        r = np.broadcast_to(np.asarray(radii, dtype=np.float64), (len(q),))
        if (r < 0).any():
            raise DataError("radius must be non-negative")
        if not inclusive:
            r = np.where(r > 0, np.nextafter(r, -np.inf), -1.0)
            out = np.zeros(len(q), dtype=np.int64)
            ok = r >= 0
            out[ok] = self._tree.query_ball_point(q[ok], r[ok], p=CHEB, return_length=True)
            return out
        return np.asarray(self._tree.query_ball_point(q, r, p=CHEB, return_length=True),
                          dtype=np.int64)


def build_index(points) -> NeighborIndex:
    return NeighborIndex(points)



def _count_sorted_1d(values, radii):
    s = np.sort(values)
    n = len(s)
    lo = np.searchsorted(s, values - radii, "left")
    hi = np.searchsorted(s, values + radii, "right")
    # the shifted bounds can be off by a rounding step; walk them onto the
    # exact predicate |s - v| <= r
    while True:
        grow_lo = (lo > 0) & (np.abs(s[np.maximum(lo - 1, 0)] - values) <= radii)
        shrink_lo = (lo < hi) & (np.abs(s[np.minimum(lo, n - 1)] - values) > radii)
        grow_hi = (hi < n) & (np.abs(s[np.minimum(hi, n - 1)] - values) <= radii)
        shrink_hi = (hi > lo) & (np.abs(s[np.maximum(hi - 1, 0)] - values) > radii)
        if not (grow_lo.any() or shrink_lo.any() or grow_hi.any() or shrink_hi.any()):
            return (hi - lo).astype(np.int64)
        lo = lo - grow_lo + shrink_lo
        hi = hi + grow_hi - shrink_hi


def self_counts(points, radii, probe: int = 16) -> np.ndarray:
    """For every row, how many rows (itself included) lie within or on its radius.

    Scalar data is counted by binary search on the sorted values. For
    vectors a ``probe``-nearest query settles most rows and only rows whose
    ball holds at least ``probe`` points fall back to a ball count.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    r = np.broadcast_to(np.asarray(radii, dtype=np.float64), (len(pts),))
    if pts.shape[1] == 1:
        return _count_sorted_1d(pts[:, 0], r)
    tree = cKDTree(pts, balanced_tree=False, compact_nodes=False)
    kk = min(probe, len(pts))
    d, _ = tree.query(pts, kk, p=CHEB)
    d = d.reshape(len(pts), kk)
    counts = (d <= r[:, None]).sum(axis=1)
    full = counts == kk
    if full.any():
        counts[full] = tree.query_ball_point(pts[full], r[full], p=CHEB, return_length=True)
    return counts.astype(np.int64)

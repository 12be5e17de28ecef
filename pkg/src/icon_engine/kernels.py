"""Numeric kernels: deterministic Lloyd K-Means and brute-force KNN graphs.

Hot loops are JIT-compiled with numba when available; set ICON_NUMBA=0 to
force the pure-numpy path (benchmarks/bench_kernels.py compares both).
Both paths share the same tie rules, so their outputs are identical:

- K-Means: deterministic farthest-first init (first centroid is point 0,
  each next centroid is the point farthest from the chosen ones, ties to
  the lower index); each point joins the nearest centroid, ties broken
  toward the lowest centroid index; a cluster that loses all members keeps
  its previous centroid.
- KNN: Euclidean distances, ties broken toward the lower point index,
  no self-edges, exactly k out-edges per node.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import KernelError


def _numba_enabled() -> bool:
    return os.environ.get("ICON_NUMBA", "1") != "0"


try:
    from numba import njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap


@njit(cache=True)
def _init_centroids_jit(points, k):
    n, d = points.shape
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = 0
    min_d = np.empty(n, dtype=np.float64)
    for i in range(n):
        s = 0.0
        for m in range(d):
            diff = points[i, m] - points[0, m]
            s += diff * diff
        min_d[i] = s
    for j in range(1, k):
        best = 0
        for i in range(1, n):
            if min_d[i] > min_d[best]:
                best = i
        chosen[j] = best
        for i in range(n):
            s = 0.0
            for m in range(d):
                diff = points[i, m] - points[best, m]
                s += diff * diff
            if s < min_d[i]:
                min_d[i] = s
    centroids = np.empty((k, d), dtype=np.float64)
    for j in range(k):
        for m in range(d):
            centroids[j, m] = points[chosen[j], m]
    return centroids


@njit(cache=True)
def _kmeans_jit(points, k, iters):
    n, d = points.shape
    centroids = _init_centroids_jit(points, k)
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(iters):
        changed = False
        for i in range(n):
            best = 0
            best_d = 0.0
            for j in range(k):
                dist = 0.0
                for m in range(d):
                    diff = points[i, m] - centroids[j, m]
                    dist += diff * diff
                if j == 0 or dist < best_d:
                    best = j
                    best_d = dist
            if labels[i] != best:
                labels[i] = best
                changed = True
        if not changed:
            break
        counts = np.zeros(k, dtype=np.int64)
        sums = np.zeros((k, d), dtype=np.float64)
        for i in range(n):
            counts[labels[i]] += 1
            for m in range(d):
                sums[labels[i], m] += points[i, m]
        for j in range(k):
            if counts[j] > 0:
                for m in range(d):
                    centroids[j, m] = sums[j, m] / counts[j]
    return labels


def _init_centroids_numpy(points, k):
    chosen = [0]
    min_d = ((points - points[0]) ** 2).sum(axis=1)
    for _ in range(1, k):
        best = int(np.argmax(min_d))  # argmax keeps the lowest index on ties
        chosen.append(best)
        min_d = np.minimum(min_d, ((points - points[best]) ** 2).sum(axis=1))
    return points[chosen].copy()


def _kmeans_numpy(points, k, iters):
    centroids = _init_centroids_numpy(points, k)
    labels = np.zeros(len(points), dtype=np.int64)
    for _ in range(iters):
        # (n, k) squared distances; argmin takes the lowest index on ties
        diff = points[:, None, :] - centroids[None, :, :]
        dists = (diff * diff).sum(axis=2)
        new_labels = np.argmin(dists, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = points[labels == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
    return labels


@njit(cache=True)
def _knn_jit(points, k):
    n, d = points.shape
    out = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        dists = np.empty(n, dtype=np.float64)
        for j in range(n):
            s = 0.0
            for m in range(d):
                diff = points[i, m] - points[j, m]
                s += diff * diff
            dists[j] = s
        taken = np.zeros(n, dtype=np.bool_)
        taken[i] = True
        for slot in range(k):
            best = -1
            best_d = 0.0
            for j in range(n):
                if taken[j]:
                    continue
                if best == -1 or dists[j] < best_d:
                    best = j
                    best_d = dists[j]
            out[i, slot] = best
            taken[best] = True
    return out


def _knn_numpy(points, k):
    diff = points[:, None, :] - points[None, :, :]
    dists = (diff * diff).sum(axis=2)
    np.fill_diagonal(dists, np.inf)
    order = np.argsort(dists, axis=1, kind="stable")
    return order[:, :k].astype(np.int64)


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2:
        raise KernelError("points must be a list of equal-length vectors")
    return arr


def kmeans(points, k: int, iters: int = 50):
    """Cluster labels for each point under deterministic Lloyd iterations."""
    arr = _as_points(points)
    if not 1 <= k <= len(arr):
        raise KernelError(f"KTooLarge: k={k} with {len(arr)} points")
    if iters < 1:
        raise KernelError("iters must be >= 1")
    if _HAVE_NUMBA and _numba_enabled():
        labels = _kmeans_jit(arr, k, iters)
    else:
        labels = _kmeans_numpy(arr, k, iters)
    return [int(v) for v in labels]


def knn_graph(points, k: int):
    """Directed edge list: each node to its k nearest neighbors.

    Edges are ordered by source node, then by neighbor rank.
    """
    arr = _as_points(points)
    if not 0 <= k < len(arr):
        raise KernelError(f"KTooLarge: k={k} with {len(arr)} points")
    if k == 0:
        return []
    if _HAVE_NUMBA and _numba_enabled():
        nbrs = _knn_jit(arr, k)
    else:
        nbrs = _knn_numpy(arr, k)
    return [(i, int(j)) for i in range(len(arr)) for j in nbrs[i]]


def kmeans_sse(points, labels, k: int) -> float:
    """Within-cluster sum of squared distances for a given assignment."""
    arr = _as_points(points)
    lab = np.asarray(labels, dtype=np.int64)
    total = 0.0
    for j in range(k):
        members = arr[lab == j]
        if len(members):
            centroid = members.mean(axis=0)
            total += float(((members - centroid) ** 2).sum())
    return total

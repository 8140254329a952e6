"""k-means (Frobenius-optimal <=K-distinct-row fit) and 1-D thresholding.

The k-means step minimizes ||points - M||_F^2 over matrices M with at most K
distinct rows: the best of `restarts` k-means++-seeded Lloyd runs wins.  Every
restart draws its own stream from (seed, restart index), so the result does
not depend on execution order and is reproducible bit-for-bit.
"""

from dataclasses import dataclass, field

import numpy as np

REL_IMPROVEMENT = 1e-9
MAX_LLOYD_ITERS = 300
DEFAULT_RESTARTS = 100


@dataclass(frozen=True, eq=False)
class Labeling:
    """Community assignment: labels in {1..K} (empty communities allowed)."""

    labels: np.ndarray
    K: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if labels.size and (labels.min() < 1 or labels.max() > self.K):
            raise ValueError(f"labels must lie in 1..{self.K}")

    @property
    def n(self):
        return self.labels.size


@dataclass(frozen=True, eq=False)
class KMeansResult:
    labeling: Labeling
    centers: np.ndarray
    cost: float
    restarts_used: int
    trace: tuple = field(default=())  # winning run's per-iteration costs


def _kmeanspp_init(points, K, rng):
    n = points.shape[0]
    centers = np.empty((K, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, K):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centers[j] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))
    return centers


def _sample_init(points, K, rng):
    idx = rng.choice(points.shape[0], size=K, replace=False)
    return points[idx].astype(float).copy()


def _assign(points, centers):
    d2 = (np.sum(points ** 2, axis=1)[:, None]
          - 2.0 * points @ centers.T
          + np.sum(centers ** 2, axis=1)[None, :])
    return np.argmin(d2, axis=1)


def _lloyd(points, K, rng, init):
    """One seeded Lloyd run; returns (cost, labels, centers, trace)."""
    n = points.shape[0]
    if init == "plusplus":
        centers = _kmeanspp_init(points, K, rng)
    else:
        centers = _sample_init(points, K, rng)
    trace = []
    prev = np.inf
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(MAX_LLOYD_ITERS):
        labels = _assign(points, centers)
        # an empty cluster re-seeds at the point farthest from its own center
        for _ in range(K):
            counts = np.bincount(labels, minlength=K)
            empty = np.nonzero(counts == 0)[0]
            if empty.size == 0:
                break
            gaps = np.sum((points - centers[labels]) ** 2, axis=1)
            centers[empty[0]] = points[np.argmax(gaps)]
            labels = _assign(points, centers)
        cost = float(np.sum((points - centers[labels]) ** 2))
        trace.append(cost)
        if cost == 0.0 or prev - cost < REL_IMPROVEMENT * prev:
            break
        prev = cost
        for k in range(K):
            mask = labels == k
            if mask.any():
                centers[k] = points[mask].mean(axis=0)
    # final centroids of the converged assignment; cost stays recomputable
    for k in range(K):
        mask = labels == k
        if mask.any():
            centers[k] = points[mask].mean(axis=0)
    cost = float(np.sum((points - centers[labels]) ** 2))
    trace.append(cost)
    return cost, labels, centers, tuple(trace)


def _renumber_by_first_member(labels, centers, K):
    """Relabel clusters 1..K in order of each cluster's first member index."""
    uniq, first = np.unique(labels, return_index=True)
    seen = list(uniq[np.argsort(first)])
    seen.extend(k for k in range(K) if k not in set(seen))
    new_of_old = np.empty(K, dtype=np.int64)
    for new, old in enumerate(seen):
        new_of_old[old] = new
    return new_of_old[labels] + 1, centers[seen]


def kmeans(points, K, restarts=DEFAULT_RESTARTS, seed=0, init="plusplus"):
    """Best of `restarts` seeded Lloyd runs on an n x d point set.

    Centers start from k-means++ seeding by default; init="sample" draws K
    distinct rows uniformly instead (the classic textbook start).  Lloyd
    stops when the relative cost improvement drops below 1e-9 or after 300
    iterations.  The winner is the lowest-cost run (lowest restart index on
    ties).  Labels are numbered 1..K by first member index; empty clusters
    are permitted.  Deterministic given (points, K, restarts, seed, init).
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
        raise ValueError(f"points must be n x d with n,d >= 1, got {points.shape}")
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    if init not in ("plusplus", "sample"):
        raise ValueError(f"unknown init {init!r}")
    if init == "sample" and K > points.shape[0]:
        raise ValueError("init='sample' needs K distinct rows, "
                         f"but K={K} > n={points.shape[0]}")
    if not np.all(np.isfinite(points)):
        raise ValueError("points contain non-finite coordinates")

    best = None
    used = 0
    for r in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence([seed, r]))
        run = _lloyd(points, K, rng, init)
        used += 1
        if best is None or run[0] < best[0]:
            best = run
        if best[0] == 0.0:
            break
    cost, labels, centers, trace = best
    labels, centers = _renumber_by_first_member(labels, centers, K)
    return KMeansResult(labeling=Labeling(labels=labels, K=K), centers=centers,
                        cost=cost, restarts_used=used, trace=trace)


def threshold_classify(r, t):
    """Two-community split of a 1-D ratio vector: label 1 iff r(i) > t."""
    r = np.asarray(r, dtype=float).ravel()
    return Labeling(labels=np.where(r > t, 1, 2), K=2)

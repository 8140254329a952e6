"""Permutation-minimized Hamming error and run summary statistics."""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cluster import Labeling

EXHAUSTIVE_K = 8


@dataclass(frozen=True, eq=False)
class HammingResult:
    """Mismatch count minimized over all K! relabelings of the truth.

    `confusion[a-1, b-1]` counts nodes with estimated label a and true label
    b; `best_perm[b-1]` is the estimated label matched to true label b, so
    mismatches = n - trace of the permuted confusion matrix.
    """

    mismatches: int
    rate: float
    best_perm: tuple
    confusion: np.ndarray


def _confusion(estimated, truth, K):
    conf = np.zeros((K, K), dtype=np.int64)
    np.add.at(conf, (estimated - 1, truth - 1), 1)
    return conf


def _best_perm_exhaustive(conf, K):
    best_perm, best_score = None, -1
    for perm in itertools.permutations(range(1, K + 1)):
        score = sum(conf[perm[b] - 1, b] for b in range(K))
        if score > best_score:
            best_perm, best_score = perm, score
    return best_perm, best_score


def _best_perm_assignment(conf, K):
    # maximum-trace matching; equivalent to the exhaustive minimum
    rows, cols = linear_sum_assignment(-conf)
    perm = np.empty(K, dtype=np.int64)
    perm[cols] = rows + 1
    return tuple(int(p) for p in perm), int(conf[rows, cols].sum())


def hamming_error(estimated, truth, K, force=None):
    """Minimum mismatch count between two labelings over label permutations.

    Both inputs are Labelings or integer vectors with labels in 1..K.  Up to
    K = 8 the search is exhaustive; beyond that an optimal assignment on the
    confusion matrix gives the same minimum at bounded cost.  `force` pins the
    strategy to 'exhaustive' or 'assignment' (used for cross-checks).
    """
    est = estimated.labels if isinstance(estimated, Labeling) else np.asarray(estimated)
    tru = truth.labels if isinstance(truth, Labeling) else np.asarray(truth)
    est = est.astype(np.int64)
    tru = tru.astype(np.int64)
    if est.shape != tru.shape:
        raise ValueError(f"length mismatch: {est.size} vs {tru.size}")
    n = est.size
    if n == 0:
        raise ValueError("empty labelings")
    for name, vec in (("estimated", est), ("truth", tru)):
        if vec.min() < 1 or vec.max() > K:
            raise ValueError(f"{name} labels must lie in 1..{K}")

    conf = _confusion(est, tru, K)
    strategy = force or ("exhaustive" if K <= EXHAUSTIVE_K else "assignment")
    if strategy == "exhaustive":
        perm, matched = _best_perm_exhaustive(conf, K)
    elif strategy == "assignment":
        perm, matched = _best_perm_assignment(conf, K)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    mismatches = int(n - matched)
    return HammingResult(mismatches=mismatches, rate=mismatches / n,
                         best_perm=tuple(perm), confusion=conf)


def summarize(values):
    """Sample mean and standard deviation (n-1 denominator; 0 for one value)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empty list")
    mean = float(values.mean())
    sd = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return mean, sd

"""Degree-corrected block model: sampling, closed-form spectra, diagnostics.

Edge probabilities are theta(i) * theta(j) * A(k, l) for nodes i in community
k and j in community l, with A normalized to max entry 1 and all theta in
(0, 1).  The expectation matrix has exactly K nonzero eigenvalues, obtainable
from the K x K problem on D A D where D holds the per-community overall degree
intensities; those closed forms drive the verification oracles, the population
ratio matrix, and the signal-to-noise diagnostics.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .cluster import Labeling
from .embed import RatioMatrix
from .errors import DegeneracyError, ModelValidityError
from .graph import Graph
from .seeding import as_rng

DENSE_OMEGA_LIMIT = 4096
DAD_GAP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DCBMParams:
    """Model parameters: block matrix A, degree weights theta, community sizes."""

    K: int
    A: np.ndarray
    theta: np.ndarray
    sizes: tuple
    g0: float = 0.999

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        theta = np.asarray(self.theta, dtype=float)
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "sizes", sizes)
        if A.shape != (self.K, self.K):
            raise ModelValidityError(f"A must be {self.K}x{self.K}, got {A.shape}")
        if not np.allclose(A, A.T, atol=1e-12):
            raise ModelValidityError("A must be symmetric")
        if A.min() < 0:
            raise ModelValidityError("A must be nonnegative")
        if abs(A.max() - 1.0) > 1e-9:
            raise ModelValidityError(f"max entry of A must be 1, got {A.max():g}")
        if len(sizes) != self.K or any(s < 1 for s in sizes):
            raise ModelValidityError(f"need {self.K} positive community sizes")
        if theta.size != sum(sizes):
            raise ModelValidityError(
                f"theta has {theta.size} entries but sizes sum to {sum(sizes)}")
        if theta.min() <= 0 or theta.max() >= 1:
            raise ModelValidityError(
                f"theta must lie strictly inside (0, 1); range is "
                f"[{theta.min():g}, {theta.max():g}]")

    @property
    def n(self):
        return self.theta.size


@dataclass(frozen=True, eq=False)
class PopulationSpectrum:
    """Closed-form nonzero eigenpairs of the expectation matrix.

    `lambdas[k]` is ||theta||^2 times the k-th largest-magnitude eigenvalue of
    dad = D A D; `a_vectors[:, k]` is the matching unit eigenvector of dad and
    `eta_vectors[:, k]` the induced unit eigenvector of the full n x n matrix,
    constant on each community after dividing entrywise by theta.
    """

    D: np.ndarray
    dad: np.ndarray
    lambdas: np.ndarray
    a_vectors: np.ndarray
    eta_vectors: np.ndarray


@dataclass(frozen=True, eq=False)
class Diagnostics:
    """Numerical health indicators for a parameter set (informational only)."""

    eigengap: float
    err_n: float
    osnr: float
    nsnr: float
    wnorm_bound: float
    osc: float
    regularity_ratio: float
    mdv_ok: bool
    mdm_ok: bool


def block_labels(sizes):
    """Contiguous-block community assignment: sizes (n1..nK) -> labels 1..K."""
    sizes = [int(s) for s in sizes]
    return Labeling(labels=np.repeat(np.arange(1, len(sizes) + 1), sizes),
                    K=len(sizes))


def _check_labels(p, labels):
    counts = np.bincount(labels.labels, minlength=p.K + 1)[1:]
    if labels.K != p.K or tuple(counts) != p.sizes:
        raise ValueError("labels do not match the declared community sizes")


def build_omega(p, labels):
    """Dense expectation matrix O(i,j) = theta(i) theta(j) A(k(i), k(j))."""
    _check_labels(p, labels)
    if p.n > DENSE_OMEGA_LIMIT:
        raise ValueError(f"dense expectation matrix limited to n <= "
                         f"{DENSE_OMEGA_LIMIT}, got {p.n}")
    lab0 = labels.labels - 1
    omega = np.outer(p.theta, p.theta) * p.A[np.ix_(lab0, lab0)]
    if omega.max() >= 1.0:
        raise ModelValidityError("edge probabilities reach 1; shrink theta or A")
    return omega


def sample_adjacency(p, labels, seed):
    """Draw one graph: independent Bernoulli(O(i,j)) upper-triangle entries.

    Streams row by row so the expectation matrix is never materialized.
    Deterministic given the seed.
    """
    _check_labels(p, labels)
    rng = as_rng(seed)
    n = p.n
    lab0 = labels.labels - 1
    theta = p.theta
    rows, cols = [], []
    for i in range(n - 1):
        probs = theta[i] * theta[i + 1:] * p.A[lab0[i], lab0[i + 1:]]
        hits = np.nonzero(rng.random(n - 1 - i) < probs)[0]
        if hits.size:
            rows.append(np.full(hits.size, i, dtype=np.int64))
            cols.append(hits.astype(np.int64) + i + 1)
    if rows:
        iu = np.concatenate(rows)
        ju = np.concatenate(cols)
    else:
        iu = ju = np.zeros(0, dtype=np.int64)
    data = np.ones(2 * iu.size, dtype=np.int8)
    adj = sp.csr_matrix((data, (np.concatenate([iu, ju]),
                                np.concatenate([ju, iu]))), shape=(n, n))
    adj.sort_indices()
    return Graph(n=n, adjacency=adj)


_THETA_PARAM_NAMES = {
    "constant": ("c",),
    "linear": ("d0", "c0"),
    "quadratic": ("d0", "c0"),
    "power2_offset": ("a", "b"),
    "two_point": ("c0", "d0"),
}


@dataclass(frozen=True)
class ThetaPattern:
    """Named degree-weight profile; `generate(n)` yields the unpermuted vector."""

    kind: str
    params: dict

    def __post_init__(self):
        names = _THETA_PARAM_NAMES.get(self.kind)
        if names is None:
            raise ValueError(f"unknown theta pattern {self.kind!r}; known: "
                             f"{sorted(_THETA_PARAM_NAMES)}")
        if set(self.params) != set(names):
            raise ValueError(f"pattern {self.kind!r} takes parameters {names}, "
                             f"got {sorted(self.params)}")
        object.__setattr__(self, "params",
                           {k: float(v) for k, v in self.params.items()})

    def generate(self, n):
        i = np.arange(1, n + 1, dtype=float)
        pp = self.params
        if self.kind == "constant":
            tilde = np.full(n, pp["c"])
        elif self.kind == "linear":
            tilde = pp["d0"] + (pp["c0"] - pp["d0"]) * (i / n)
        elif self.kind == "quadratic":
            tilde = pp["d0"] + (pp["c0"] - pp["d0"]) * (i / n) ** 2
        elif self.kind == "power2_offset":
            tilde = pp["a"] + pp["b"] * (i / n) ** 2
        else:  # two_point
            tilde = np.where(i <= n // 2, pp["c0"], pp["d0"])
        if tilde.min() <= 0 or tilde.max() >= 1:
            raise ModelValidityError(
                f"theta pattern {self.describe()} leaves (0, 1): range "
                f"[{tilde.min():g}, {tilde.max():g}]")
        return tilde

    def describe(self):
        inner = " ".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.kind} {inner}"


def permuted_theta(pattern, n, seed):
    """Generate the pattern's vector and randomly permute its coordinates."""
    rng = as_rng(seed)
    return rng.permutation(pattern.generate(n))


def _community_norms(p, labels):
    norms = np.zeros(p.K)
    for k in range(p.K):
        norms[k] = np.linalg.norm(p.theta[labels.labels == k + 1])
    if norms.min() == 0:
        raise DegeneracyError("a community has zero total degree intensity")
    return norms


def _magnitude_order(values):
    return sorted(range(len(values)),
                  key=lambda i: (-abs(values[i]), values[i] < 0))


def population_spectrum(p, labels):
    """Closed-form eigenpairs of the expectation matrix via the K x K problem.

    Requires the eigenvalues of D A D to be simple (adjacent gap above 1e-12).
    """
    _check_labels(p, labels)
    comm_norms = _community_norms(p, labels)
    theta_norm = np.linalg.norm(p.theta)
    D = np.diag(comm_norms / theta_norm)
    dad = D @ p.A @ D
    mu, avec = np.linalg.eigh(dad)
    if p.K > 1 and np.min(np.diff(np.sort(mu))) < DAD_GAP_TOL:
        raise DegeneracyError(
            "non-simple eigenvalue in the community-level matrix "
            f"(adjacent gap below {DAD_GAP_TOL:g})")
    order = _magnitude_order(mu)
    mu = mu[order]
    avec = avec[:, order]

    lab0 = labels.labels - 1
    eta = (avec[lab0, :] / comm_norms[lab0, None]) * p.theta[:, None]
    # fix signs: largest-magnitude entry of each eta positive, a flipped to match
    for k in range(p.K):
        col = eta[:, k]
        i = int(np.flatnonzero(np.abs(col) == np.abs(col).max())[0])
        if col[i] < 0:
            eta[:, k] = -col
            avec[:, k] = -avec[:, k]
    return PopulationSpectrum(D=D, dad=dad, lambdas=theta_norm ** 2 * mu,
                              a_vectors=avec, eta_vectors=eta)


def r0_vector(a, b, c, d1, d2):
    """Per-community values of the two-community eigenvector ratio.

    Community 1 maps to 1; community 2 to the negative squared ratio
    -((a d1^2 - c d2^2 + sqrt((a d1^2 - c d2^2)^2 + 4 b^2 d1^2 d2^2))
    / (2 b d1 d2))^2.  Requires b > 0 and a c != b^2 (otherwise the second
    eigenvalue vanishes and the ratio is undefined).
    """
    if b <= 0:
        raise ValueError(f"b must be positive, got {b:g}")
    if a * c == b * b:
        raise ValueError("a*c == b^2 makes the second eigenvalue zero")
    x = a * d1 ** 2 - c * d2 ** 2
    disc = math.sqrt(x ** 2 + 4.0 * b ** 2 * d1 ** 2 * d2 ** 2)
    return np.array([1.0, -((x + disc) / (2.0 * b * d1 * d2)) ** 2])


def population_ratio_matrix(ps):
    """Noise-free ratio matrix R(i,k) = eta_{k+1}(i) / eta_1(i).

    Has exactly K distinct rows (the k-th trailing entry on community l is
    a_{k+1}(l)/a_1(l)) and any two distinct rows are at distance >= sqrt(2).
    """
    eta = ps.eta_vectors
    lead = eta[:, 0]
    if np.any(lead == 0.0):
        raise DegeneracyError("population leading eigenvector has zero entries")
    R = eta[:, 1:] / lead[:, None]
    return RatioMatrix(R=R, T_n=math.inf, truncated_count=0)


def dad_eigengap(dad):
    """Minimum gap between adjacent eigenvalues (sorted by value)."""
    mu = np.sort(np.linalg.eigvalsh(dad))
    if mu.size < 2:
        return math.inf
    return float(np.min(np.diff(mu)))


def diagnostics(p, labels):
    """Evaluate the closed-form error and signal-to-noise quantities.

    The moderate-deviation flags use unit constants and are informational;
    nothing in the pipeline gates on them.
    """
    _check_labels(p, labels)
    theta = p.theta
    n = p.n
    logn = math.log(n)
    l1 = float(theta.sum())
    sq = float(theta @ theta)
    cube3 = float(np.sum(theta ** 3))
    inv_sum = float(np.sum(1.0 / theta))
    tmin = float(theta.min())
    tmax = float(theta.max())

    comm_norms = _community_norms(p, labels)
    theta_norm = math.sqrt(sq)
    D = np.diag(comm_norms / theta_norm)
    dad = D @ p.A @ D
    gap = dad_eigengap(dad)

    err_n = (cube3 / sq ** 3) * (inv_sum + (logn / tmin) * (l1 / sq) ** 2)
    osnr = sq / math.sqrt(logn * tmax * l1)
    nsnr = l1 / math.sqrt(logn * n)
    wnorm_bound = 4.0 * math.sqrt(logn * tmax * l1)

    # oscillation of theta^{-1} eta_1: community-level values a_1(k)/||theta^(k)||
    mu, avec = np.linalg.eigh(dad)
    a1 = avec[:, _magnitude_order(mu)[0]]
    i = int(np.flatnonzero(np.abs(a1) == np.abs(a1).max())[0])
    if a1[i] < 0:
        a1 = -a1
    vals = a1 / comm_norms
    osc = float(vals.max() / vals.min()) if vals.min() > 0 else math.inf

    regularity_ratio = logn * tmax * l1 / sq ** 2
    floor_v = logn * tmax ** 2 / cube3
    mdv_ok = bool(
        np.sum(np.maximum(theta, floor_v)) <= l1
        and np.sum(np.maximum(1.0 / theta, floor_v / theta ** 2)) <= inv_sum)
    mdm_ok = bool(logn / tmin ** 2 <= max(l1 / tmin, tmax * inv_sum))
    return Diagnostics(eigengap=gap, err_n=err_n, osnr=osnr, nsnr=nsnr,
                       wnorm_bound=wnorm_bound, osc=osc,
                       regularity_ratio=regularity_ratio,
                       mdv_ok=mdv_ok, mdm_ok=mdm_ok)

"""Leading eigenpairs (largest magnitude) of a symmetric linear operator.

"Leading" compares magnitudes, ignoring sign, so both ends of the spectrum
matter: adjacency matrices routinely carry large negative eigenvalues.  The
solver is a Lanczos iteration with full reorthogonalization; Ritz pairs from
the whole tridiagonal spectrum are pooled and the K largest by magnitude kept,
with converged vectors locked (deflated) between restarts.  Small problems
(n <= 512) go through a dense symmetric eigendecomposition instead, which also
serves as the exactness reference in the test suite.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import NonConvergenceError

DENSE_CUTOFF = 512
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 50


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenpairs sorted by descending |value|; positive first on exact ties."""

    pairs: list
    tol: float

    @property
    def values(self):
        return np.array([p.value for p in self.pairs])

    @property
    def vectors(self):
        """n x K matrix whose k-th column is the k-th leading eigenvector."""
        return np.column_stack([p.vector for p in self.pairs])

    def __len__(self):
        return len(self.pairs)


def _as_operator(op):
    """Normalize the accepted operator kinds to (n, matvec, densifier)."""
    if hasattr(op, "adjacency"):  # Graph
        mat = op.adjacency.astype(float)
        return mat.shape[0], mat.__matmul__, lambda: mat.toarray()
    if sp.issparse(op):
        mat = op.tocsr().astype(float)
        return mat.shape[0], mat.__matmul__, lambda: mat.toarray()
    if isinstance(op, np.ndarray):
        mat = np.asarray(op, dtype=float)
        return mat.shape[0], mat.__matmul__, lambda: mat
    if hasattr(op, "matvec") and hasattr(op, "shape"):
        n = op.shape[0]
        return n, op.matvec, lambda: np.column_stack(
            [op.matvec(col) for col in np.eye(n)])
    raise TypeError(f"unsupported operator type: {type(op).__name__}")


def _fix_sign(v):
    """Make the largest-magnitude entry positive (lowest index on exact ties)."""
    a = np.abs(v)
    i = int(np.flatnonzero(a == a.max())[0])
    return -v if v[i] < 0 else v


def _magnitude_order(values):
    """Indices sorting values by descending |value|, positive first on ties."""
    return sorted(range(len(values)),
                  key=lambda i: (-abs(values[i]), values[i] < 0))


def _spectrum_from(values, vectors, matvec, tol):
    pairs = []
    for val, vec in zip(values, vectors):
        vec = _fix_sign(vec)
        res = float(np.linalg.norm(matvec(vec) - val * vec))
        pairs.append(EigenPair(value=float(val), vector=vec, residual=res))
    return Spectrum(pairs=pairs, tol=tol)


def _dense_leading(matvec, dense, K, tol):
    vals, vecs = np.linalg.eigh(dense())
    order = _magnitude_order(vals)[:K]
    return _spectrum_from(vals[order], [vecs[:, i] for i in order], matvec, tol)


def _krylov(matvec, v0, m, deflate, rng):
    """m-step Lanczos with full reorthogonalization against Q and `deflate`.

    Returns the basis Q (n x m') and the tridiagonal coefficients.  On
    breakdown the build continues from a fresh random direction orthogonal to
    everything seen so far, so an invariant subspace cannot stall the sweep.
    """
    n = v0.size
    Q = np.zeros((n, m))
    alphas = np.zeros(m)
    betas = np.zeros(max(m - 1, 0))

    def project_out(x):
        if deflate.shape[1]:
            x = x - deflate @ (deflate.T @ x)
        return x

    q = project_out(v0)
    nrm = np.linalg.norm(q)
    if nrm < 1e-14:
        q = project_out(rng.standard_normal(n))
        nrm = np.linalg.norm(q)
    q /= nrm

    k = 0
    while k < m:
        Q[:, k] = q
        u = matvec(q)
        alphas[k] = q @ u
        r = u - alphas[k] * q
        if k > 0:
            r -= betas[k - 1] * Q[:, k - 1]
        # full reorthogonalization, twice for safety
        for _ in range(2):
            r -= Q[:, :k + 1] @ (Q[:, :k + 1].T @ r)
            r = project_out(r)
        k += 1
        if k == m:
            break
        beta = np.linalg.norm(r)
        if beta < 1e-12 * max(1.0, abs(alphas[:k]).max()):
            # invariant subspace hit: restart the chain from a random direction
            r = project_out(rng.standard_normal(n))
            r -= Q[:, :k] @ (Q[:, :k].T @ r)
            beta_new = np.linalg.norm(r)
            if beta_new < 1e-14:  # space exhausted
                return Q[:, :k], alphas[:k], betas[:k - 1]
            betas[k - 1] = 0.0
            q = r / beta_new
        else:
            betas[k - 1] = beta
            q = r / beta
    return Q, alphas, betas


def leading_eigs(op, K, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, seed=0,
                 method="auto"):
    """The K leading (largest-|lambda|) eigenpairs of a symmetric operator.

    `op` may be a Graph, a scipy sparse matrix, a dense ndarray, or any object
    with `matvec` and `shape`.  Symmetry is the caller's responsibility.  Each
    returned vector has unit norm, residual ||A v - lambda v|| <= tol *
    max(1, |lambda|), and its largest-magnitude entry made positive.  The
    starting vector is seeded uniform random, so results are reproducible.
    `method` forces the 'dense' or 'lanczos' path; 'auto' uses dense for
    n <= 512.
    """
    n, matvec, dense = _as_operator(op)
    if not 1 <= K <= n:
        raise ValueError(f"K must be in [1, {n}], got {K}")
    if method not in ("auto", "dense", "lanczos"):
        raise ValueError(f"unknown method {method!r}")
    if method == "dense" or (method == "auto" and n <= DENSE_CUTOFF):
        return _dense_leading(matvec, dense, K, tol)

    rng = np.random.default_rng(seed)
    m = min(n, max(2 * K + 20, 40))
    locked_vals = []
    locked_vecs = np.zeros((n, 0))
    v0 = rng.random(n)
    v0 /= np.linalg.norm(v0)
    best_residuals = None

    for _ in range(max_iter):
        budget = min(m, n - locked_vecs.shape[1])
        Q, alphas, betas = _krylov(matvec, v0, budget, locked_vecs, rng)
        T = np.diag(alphas)
        if betas.size:
            T += np.diag(betas, 1) + np.diag(betas, -1)
        tvals, tvecs = np.linalg.eigh(T)
        ritz_vecs = Q @ tvecs

        cand_vals = np.concatenate([np.array(locked_vals), tvals])
        cand_vecs = np.hstack([locked_vecs, ritz_vecs])
        order = _magnitude_order(cand_vals)[:K]
        vals = cand_vals[order]
        vecs = cand_vecs[:, order]

        residuals = np.array([
            np.linalg.norm(matvec(vecs[:, i]) - vals[i] * vecs[:, i])
            for i in range(len(order))])
        limits = tol * np.maximum(1.0, np.abs(vals))
        best_residuals = residuals
        if len(order) == K and np.all(residuals <= limits):
            return _spectrum_from(vals, [vecs[:, i] for i in range(K)],
                                  matvec, tol)

        # lock newly converged directions one at a time (modified Gram-Schmidt
        # against the locked set; duplicates of locked vectors project to ~0)
        conv = residuals <= limits
        for i in np.nonzero(conv)[0]:
            w = vecs[:, i].copy()
            for _ in range(2):
                if locked_vecs.shape[1]:
                    w -= locked_vecs @ (locked_vecs.T @ w)
            nrm = np.linalg.norm(w)
            if nrm > 0.5:
                locked_vecs = np.hstack([locked_vecs, (w / nrm)[:, None]])
                locked_vals.append(vals[i])
        # restart rich in every unconverged direction
        bad = np.nonzero(~conv)[0]
        v0 = vecs[:, bad].sum(axis=1) if bad.size else rng.random(n)
        nrm = np.linalg.norm(v0)
        v0 = rng.standard_normal(n) if nrm < 1e-14 else v0 / nrm

    raise NonConvergenceError(
        f"eigensolver did not reach tol={tol:g} within {max_iter} restarts "
        f"(best residuals: {np.array2string(best_residuals, precision=3)})",
        residuals=best_residuals)

"""Small dense linear-algebra kernels.

These are deliberately self-contained: the problems handled here have at
most a dozen unknowns, and keeping the eigen/rank/norm routines in plain
numpy lets the test-suite check them against LAPACK as an independent route.
"""

import numpy as np

SYMMETRY_TOL = 1e-10


def eigenvalues_symmetric(S, tol=1e-15, max_sweeps=100):
    """Ascending eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    S : array-like of shape (k, k)
        Symmetric matrix (asymmetry above ``1e-10`` raises).
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm falls below
        ``tol * ||S||_F``.

    Returns
    -------
    ndarray of shape (k,)
    """
    a = np.array(S, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or infinity")
    if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    k = a.shape[0]
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(k)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                # smaller root of t^2 + 2 theta t - 1 = 0
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diag(a))


def _power_sigma(G, x, rtol, max_iter):
    # Power iteration on G whose operator is squared after every sweep, so
    # sweep j applies G^(2^j): clustered top eigenvalues need a few dozen
    # sweeps instead of millions of plain iterations.  Stops on the relative
    # eigen-residual, which bounds the eigenvalue error.
    P = G / np.linalg.norm(G)
    lam = 0.0
    for _ in range(max_iter):
        z = P @ x
        nz = np.linalg.norm(z)
        if nz == 0.0:
            break
        x = z / nz
        Gx = G @ x
        lam = float(x @ Gx)
        if np.linalg.norm(Gx - lam * x) <= rtol * abs(lam):
            break
        P = P @ P
        nP = np.linalg.norm(P)
        if nP == 0.0 or not np.isfinite(nP):
            break
        P /= nP
    return np.sqrt(max(lam, 0.0))


def spectral_norm(S, rtol=1e-12, max_iter=200, seed=0):
    """Largest singular value via power iteration on ``S^T S``.

    Runs from the normalized all-ones vector and from one seeded random
    start and returns the larger estimate, so a start orthogonal to the
    dominant singular vector cannot hide it.
    """
    S = np.asarray(S, dtype=np.float64)
    if S.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={S.ndim}")
    if not np.all(np.isfinite(S)):
        raise ValueError("matrix contains NaN or infinity")
    if S.size == 0 or not np.any(S):
        return 0.0
    k = S.shape[1]
    x0 = np.ones(k) / np.sqrt(k)
    x1 = np.random.default_rng(seed).standard_normal(k)
    x1 /= np.linalg.norm(x1)
    G = S.T @ S
    return max(_power_sigma(G, x0, rtol, max_iter), _power_sigma(G, x1, rtol, max_iter))


def matrix_rank(A, rel_tol=1e-10):
    """Rank by Gaussian elimination with complete pivoting.

    A pivot counts when its magnitude exceeds ``rel_tol * ||A||_inf``.
    """
    a = np.array(A, dtype=np.float64, copy=True)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={a.ndim}")
    norm_inf = np.max(np.sum(np.abs(a), axis=1), initial=0.0)
    if norm_inf == 0.0:
        return 0
    threshold = rel_tol * norm_inf
    rows, cols = a.shape
    rank = 0
    for r in range(min(rows, cols)):
        sub = np.abs(a[r:, r:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= threshold:
            break
        a[[r, r + i]] = a[[r + i, r]]
        a[:, [r, r + j]] = a[:, [r + j, r]]
        a[r + 1:, r:] -= np.outer(a[r + 1:, r] / a[r, r], a[r, r:])
        rank += 1
    return rank

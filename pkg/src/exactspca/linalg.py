"""Dense kernels for small symmetric matrices.

Everything in this module is deterministic: fixed pivot tie-breaking, a fixed
Jacobi sweep order and a fixed eigenvector sign convention, so identical
inputs produce identical outputs bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidParameters,
    NoConvergence,
    NotPositiveSemidefinite,
    NotSymmetric,
)

DEFAULT_RANK_TOL = 1e-10
JACOBI_SWEEP_LIMIT = 100
JACOBI_OFFDIAG_TOL = 1e-12


def as_symmetric(a) -> np.ndarray:
    """Return ``a`` as a float array, requiring exact stored symmetry."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise NotSymmetric("matrix dimension must be at least 1")
    if not np.array_equal(a, a.T):
        raise NotSymmetric("matrix is not symmetric as stored")
    return a


def symmetrize(a) -> np.ndarray:
    """Average a nearly symmetric matrix into an exactly symmetric one.

    ``(a + a.T) / 2`` is exactly symmetric in IEEE arithmetic, which is what
    `as_symmetric` demands of its callers.
    """
    a = np.asarray(a, dtype=float)
    return (a + a.T) / 2.0


@dataclass(frozen=True)
class PsdFactor:
    """A factor R with K = R @ R.T and its numerical rank."""

    n: int
    rank: int
    factor: np.ndarray  # (n, rank); columns ordered by decreasing pivot

    def row(self, j: int) -> np.ndarray:
        return self.factor[j]

    def rows(self, indices) -> np.ndarray:
        return self.factor[np.asarray(indices, dtype=int)]


def pivoted_cholesky(kmatrix, tol_rank: float = DEFAULT_RANK_TOL) -> PsdFactor:
    """Factor a PSD matrix as R @ R.T using diagonal (complete) pivoting.

    The pivot is always the largest remaining diagonal entry; elimination
    stops once it drops to ``tol_rank`` times the initial largest diagonal,
    which defines the numerical rank.  A pivot below the mirrored negative
    threshold raises `NotPositiveSemidefinite`.
    """
    a = as_symmetric(kmatrix).copy()
    n = a.shape[0]
    base = max(float(np.max(np.diagonal(a))), 0.0)
    stop = tol_rank * base
    neg = -tol_rank * base
    perm = np.arange(n)
    lower = np.zeros((n, n))
    rank = 0
    for i in range(n):
        d = np.diagonal(a)[i:]
        if float(np.min(d)) < neg:
            raise NotPositiveSemidefinite(
                f"pivot {float(np.min(d)):.3e} below tolerance {neg:.3e}"
            )
        j = i + int(np.argmax(d))
        pivot = float(a[j, j])
        if pivot <= stop:
            break
        if j != i:
            a[:, [i, j]] = a[:, [j, i]]
            a[[i, j], :] = a[[j, i], :]
            lower[[i, j], :] = lower[[j, i], :]
            perm[[i, j]] = perm[[j, i]]
        root = np.sqrt(pivot)
        lower[i:, i] = a[i:, i] / root
        # Schur complement of the eliminated row/column.
        a[i + 1 :, i + 1 :] -= np.outer(lower[i + 1 :, i], lower[i + 1 :, i])
        a[i:, i] = 0.0
        a[i, i:] = 0.0
        rank += 1
    factor = np.zeros((n, rank))
    factor[perm, :] = lower[:, :rank]
    return PsdFactor(n=n, rank=rank, factor=factor)


@dataclass(frozen=True)
class EigenResult:
    """Full spectrum of a symmetric matrix, eigenvalues descending."""

    eigenvalues: np.ndarray  # (n,)
    eigenvectors: np.ndarray  # (n, n), column k pairs with eigenvalues[k]


def symmetric_eig(a, max_sweeps: int = JACOBI_SWEEP_LIMIT) -> EigenResult:
    """Eigendecomposition by cyclic Jacobi rotations.

    Deterministic for a fixed input: the sweep order is fixed, eigenvalues are
    sorted descending with a stable tie order, and each eigenvector is scaled
    so its first nonzero component is positive.
    """
    a = as_symmetric(a).copy()
    n = a.shape[0]
    v = np.eye(n)
    scale = float(np.max(np.abs(a))) if n > 0 else 0.0
    if n > 1 and scale > 0.0:
        tol = JACOBI_OFFDIAG_TOL * scale
        converged = False
        others = np.ones(n, dtype=bool)
        for _ in range(max_sweeps):
            iu = np.triu_indices(n, 1)
            if float(np.max(np.abs(a[iu]))) <= tol:
                converged = True
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if abs(apq) <= tol:
                        continue
                    app = a[p, p]
                    aqq = a[q, q]
                    theta = (aqq - app) / (2.0 * apq)
                    sgn = 1.0 if theta >= 0.0 else -1.0
                    t = sgn / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    others[:] = True
                    others[p] = others[q] = False
                    aip = a[others, p]
                    aiq = a[others, q]
                    new_p = c * aip - s * aiq
                    new_q = s * aip + c * aiq
                    a[others, p] = new_p
                    a[p, others] = new_p
                    a[others, q] = new_q
                    a[q, others] = new_q
                    a[p, p] = app - t * apq
                    a[q, q] = aqq + t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
        if not converged:
            iu = np.triu_indices(n, 1)
            if float(np.max(np.abs(a[iu]))) > tol:
                raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    eigenvalues = np.diagonal(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = v[:, order].copy()
    for k in range(n):
        nonzero = np.nonzero(vectors[:, k])[0]
        if nonzero.size and vectors[nonzero[0], k] < 0.0:
            vectors[:, k] = -vectors[:, k]
    return EigenResult(eigenvalues=eigenvalues, eigenvectors=vectors)


def solve_pca(a, d: int) -> tuple[float, np.ndarray]:
    """Maximize trace(X.T @ A @ X) over orthonormal n-by-d matrices X.

    Returns the optimum (the sum of the d largest eigenvalues of A) together
    with a maximizing X whose columns are the corresponding eigenvectors.
    """
    eig = symmetric_eig(a)
    n = eig.eigenvalues.shape[0]
    if not 1 <= d <= n:
        raise InvalidParameters(f"need 1 <= d <= {n}, got d={d}")
    value = float(np.sum(eig.eigenvalues[:d]))
    return value, eig.eigenvectors[:, :d].copy()

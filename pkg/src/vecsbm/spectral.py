"""Vanilla spectral initialisation: top-|lambda| eigenvectors of A, then k-means."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InputError, NumericError
from .model import CovGraph, Partition


@dataclass(frozen=True)
class SpectralEmbedding:
    vectors: np.ndarray  # (n, K), unit-norm columns
    values: np.ndarray  # (K,), descending |lambda|
    residuals: np.ndarray  # ||A v - lambda v|| per pair
    degenerate: bool = False
    method: str = "dense"


def _as_operator(graph):
    if isinstance(graph, CovGraph):
        return graph.adjacency_matrix()
    if sp.issparse(graph):
        return graph.tocsr().astype(float)
    return np.asarray(graph, dtype=float)


def _order_by_magnitude(values):
    # ties in |lambda| go to the positive eigenvalue first
    return np.lexsort((-values, -np.abs(values)))


def _fix_signs(V):
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def lanczos(A, k, tol=1e-8, max_iter=None, seed=0):
    """Top-``k`` eigenpairs by magnitude of a symmetric operator via Lanczos.

    Uses full reorthogonalisation against every stored Lanczos vector. On
    breakdown (an invariant subspace was found) a fresh random vector
    orthogonal to the basis continues the iteration, which also picks up
    repeated eigenvalues. The Krylov dimension grows until every requested
    Ritz pair meets ``||A v - theta v|| <= tol * max(1, |theta_1|)``.
    """
    n = A.shape[0]
    max_iter = n if max_iter is None else min(max_iter, n)
    rng = np.random.default_rng(seed)
    Q = np.zeros((n, max_iter))
    alpha = np.zeros(max_iter)
    beta = np.zeros(max_iter)
    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)
    checkpoint = min(max_iter, max(2 * k + 20, 40))
    worst = np.inf
    m = 0
    while m < max_iter:
        Q[:, m] = q
        w = A @ q
        alpha[m] = q @ w
        w -= Q[:, : m + 1] @ (Q[:, : m + 1].T @ w)
        w -= Q[:, : m + 1] @ (Q[:, : m + 1].T @ w)
        b = np.linalg.norm(w)
        m += 1
        if m < max_iter and b <= 1e-10 * max(1.0, np.abs(alpha[:m]).max()):
            # invariant subspace: restart orthogonally, tridiagonal coupling is zero
            beta[m - 1] = 0.0
            w = rng.standard_normal(n)
            for _ in range(2):
                w -= Q[:, :m] @ (Q[:, :m].T @ w)
            q = w / np.linalg.norm(w)
        else:
            beta[m - 1] = b
            q = w / b if b > 0 else w
        if m == checkpoint or m == max_iter:
            T = np.diag(alpha[:m]) + np.diag(beta[: m - 1], 1) + np.diag(beta[: m - 1], -1)
            theta, S = np.linalg.eigh(T)
            order = _order_by_magnitude(theta)[:k]
            theta, V = theta[order], Q[:, :m] @ S[:, order]
            V /= np.linalg.norm(V, axis=0)
            res = np.linalg.norm(A @ V - V * theta, axis=0)
            scale = max(1.0, abs(theta[0])) if k else 1.0
            worst = res.max(initial=0.0) / scale
            if m >= k and worst <= tol:
                return theta, V, res
            checkpoint = min(max_iter, 2 * checkpoint)
    raise NumericError(
        f"Lanczos did not converge in {max_iter} steps (worst relative residual {worst:.3g})",
        worst_residual=worst,
    )


def top_k_eigenpairs(graph, K, tol=1e-8, max_iter=None, seed=0, dense_threshold=512):
    """Eigenpairs of the binary adjacency with the ``K`` largest ``|lambda|``.

    Dense ``eigh`` is used up to ``dense_threshold`` nodes, Lanczos beyond.
    Eigenvector signs are fixed so the largest-magnitude entry is positive.
    """
    A = _as_operator(graph)
    n = A.shape[0]
    if K > n:
        raise InputError(f"K={K} exceeds n={n}")
    if (A.nnz if sp.issparse(A) else np.count_nonzero(A)) == 0:
        V = np.eye(n, K)
        return SpectralEmbedding(V, np.zeros(K), np.zeros(K), degenerate=True, method="empty")
    if n <= dense_threshold:
        dense = A.toarray() if sp.issparse(A) else A
        vals, vecs = np.linalg.eigh(dense)
        order = _order_by_magnitude(vals)[:K]
        values, V = vals[order], vecs[:, order]
        method = "dense"
    else:
        values, V, _ = lanczos(A, K, tol=tol, max_iter=max_iter, seed=seed)
        method = "lanczos"
    V = _fix_signs(V)
    residuals = np.linalg.norm(A @ V - V * values, axis=0)
    return SpectralEmbedding(V, values, residuals, degenerate=False, method=method)


def wcss(points, labels, centers=None):
    """Within-cluster sum of squared distances."""
    points = np.asarray(points, dtype=float)
    if centers is None:
        K = labels.max() + 1 if labels.size else 0
        centers = np.array([points[labels == k].mean(axis=0) if np.any(labels == k) else np.zeros(points.shape[1]) for k in range(K)])
    return float(((points - centers[labels]) ** 2).sum())


def _sq_dists(points, centers):
    d2 = (points**2).sum(1)[:, None] - 2 * points @ centers.T + (centers**2).sum(1)[None, :]
    return np.maximum(d2, 0.0)


def _plusplus_seeds(points, K, rng):
    n = points.shape[0]
    centers = [points[rng.integers(n)]]
    closest = ((points - centers[0]) ** 2).sum(1)
    for _ in range(1, K):
        total = closest.sum()
        idx = rng.integers(n) if total <= 0 else rng.choice(n, p=closest / total)
        centers.append(points[idx])
        closest = np.minimum(closest, ((points - points[idx]) ** 2).sum(1))
    return np.array(centers)


def lloyd(points, centers, max_iter=100, tol=1e-6):
    """Lloyd iterations from ``centers``; returns ``(labels, centers, wcss_history)``.

    An empty cluster is reseeded at the point farthest from its assigned centroid.
    """
    points = np.asarray(points, dtype=float)
    centers = np.array(centers, dtype=float)
    K = centers.shape[0]
    history = []
    labels = None
    for _ in range(max_iter):
        d2 = _sq_dists(points, centers)
        labels = np.argmin(d2, axis=1)
        for k in range(K):
            if not np.any(labels == k):
                own = d2[np.arange(points.shape[0]), labels]
                counts = np.bincount(labels, minlength=K)
                own[counts[labels] <= 1] = -1.0
                far = int(np.argmax(own))
                labels[far] = k
        new_centers = np.array([points[labels == k].mean(axis=0) for k in range(K)])
        history.append(float(((points - new_centers[labels]) ** 2).sum()))
        centers = new_centers
        if len(history) > 1 and history[-2] - history[-1] <= tol * max(history[-2], 1e-300):
            break
    return labels, centers, history


def kmeans(points, K, restarts=20, seed=0, max_iter=100, tol=1e-6):
    """k-means++ seeded Lloyd, best of ``restarts`` runs by WCSS."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    n = points.shape[0]
    if n < K:
        raise InputError(f"need at least K={K} points, got {n}")
    best_labels, best_cost = None, np.inf
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        labels, _, history = lloyd(points, _plusplus_seeds(points, K, rng), max_iter=max_iter, tol=tol)
        if history[-1] < best_cost:
            best_labels, best_cost = labels, history[-1]
    return Partition(best_labels, K)


def spectral_init(graph, K, seed=0, tol=1e-8, restarts=20):
    emb = top_k_eigenpairs(graph, K, tol=tol, seed=seed)
    return kmeans(emb.vectors, K, restarts=restarts, seed=seed)

"""Clustering quality (misclustering rate, NMI) and the signal matrix Delta^2."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InputError
from .model import Partition

EXHAUSTIVE_MAX_K = 8


def _labels(z):
    return z.assignments if isinstance(z, Partition) else np.asarray(z, dtype=np.int64)


def confusion(z_hat, z, K=None):
    a, b = _labels(z_hat), _labels(z)
    if K is None:
        K = int(max(a.max(initial=-1), b.max(initial=-1)) + 1)
    C = np.zeros((K, K), dtype=np.int64)
    np.add.at(C, (a, b), 1)
    return C


def _best_perm_exhaustive(C):
    K = C.shape[0]
    best, best_perm = -1, None
    for perm in itertools.permutations(range(K)):
        hits = int(C[np.arange(K), perm].sum())
        if hits > best:
            best, best_perm = hits, perm
    return best, np.array(best_perm)


def _best_perm_hungarian(C):
    rows, cols = linear_sum_assignment(C.max(initial=0) - C)
    perm = np.empty(C.shape[0], dtype=np.int64)
    perm[rows] = cols
    return int(C[rows, cols].sum()), perm


def misclustering_rate(z_hat, z, method="auto"):
    """Fraction of nodes misassigned under the best relabelling of ``z_hat``.

    Returns ``(rate, perm)`` where ``perm[k]`` is the true label matched to the
    estimated label ``k``. ``method`` is ``auto``, ``exhaustive`` or ``hungarian``.
    """
    a, b = _labels(z_hat), _labels(z)
    if a.shape != b.shape:
        raise InputError(f"partition sizes differ: {a.size} vs {b.size}")
    K_a = z_hat.K if isinstance(z_hat, Partition) else None
    K_b = z.K if isinstance(z, Partition) else None
    if K_a is not None and K_b is not None and K_a != K_b:
        raise InputError(f"community counts differ: {K_a} vs {K_b}")
    K = K_a or K_b or int(max(a.max(initial=-1), b.max(initial=-1)) + 1)
    n = a.size
    if n == 0:
        return 0.0, np.arange(K)
    C = confusion(a, b, K)
    if method == "auto":
        method = "exhaustive" if K <= EXHAUSTIVE_MAX_K else "hungarian"
    if method == "exhaustive":
        hits, perm = _best_perm_exhaustive(C)
    elif method == "hungarian":
        hits, perm = _best_perm_hungarian(C)
    else:
        raise InputError(f"unknown method {method!r}")
    return (n - hits) / n, perm


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


NMI_NORMALIZATIONS = {
    "sqrt": lambda ha, hb: math.sqrt(ha * hb),
    "arithmetic": lambda ha, hb: 0.5 * (ha + hb),
    "min": min,
    "max": max,
}


def nmi(z_hat, z, normalization="sqrt"):
    """Mutual information normalised by a mean of the two entropies.

    ``normalization`` is ``sqrt`` (geometric mean, the default),
    ``arithmetic``, ``min`` or ``max``. When either entropy vanishes the score is 1 if the two labelings induce
    the same set partition and 0 otherwise.
    """
    if normalization not in NMI_NORMALIZATIONS:
        raise InputError(f"unknown NMI normalization {normalization!r}")
    a, b = _labels(z_hat), _labels(z)
    if a.shape != b.shape:
        raise InputError(f"partition sizes differ: {a.size} vs {b.size}")
    n = a.size
    if n == 0:
        return 1.0
    _, a = np.unique(a, return_inverse=True)
    _, b = np.unique(b, return_inverse=True)
    C = confusion(a, b, int(max(a.max(), b.max()) + 1)).astype(float)
    ha, hb = _entropy(C.sum(1), n), _entropy(C.sum(0), n)
    if ha == 0.0 or hb == 0.0:
        same = np.count_nonzero(C) == np.count_nonzero(C.sum(1)) == np.count_nonzero(C.sum(0))
        return 1.0 if same else 0.0
    nz = C > 0
    outer = np.outer(C.sum(1), C.sum(0))
    mi = float((C[nz] / n * np.log(C[nz] * n / outer[nz])).sum())
    return float(min(1.0, max(0.0, mi / NMI_NORMALIZATIONS[normalization](ha, hb))))


def snr_delta2(params, community_sizes):
    """Signal matrix ``Delta^2(a, b)`` with zero diagonal, and its off-diagonal minimum.

    ``Delta^2(a,b) = log(p/q) (n_a p - n_b q) + sum_l n_l Pi_al ||mu_al - mu_bl||^2``;
    the graph term is exactly 0 when ``p == q``.
    """
    form = params.symmetric_form()
    if form is None:
        raise InputError("Delta^2 needs a symmetric SBM connectivity (q 11^T + (p-q) I)")
    p, q = form
    if p <= 0 or q <= 0:
        raise InputError(f"p and q must be positive, got p={p}, q={q}")
    sizes = np.asarray(community_sizes, dtype=float)
    K = params.K
    if sizes.shape != (K,):
        raise InputError(f"expected {K} community sizes")
    log_ratio = 0.0 if p == q else math.log(p / q)
    # diff2[a, b, l] = ||mu_al - mu_bl||^2
    diff2 = ((params.Mu[:, None, :, :] - params.Mu[None, :, :, :]) ** 2).sum(-1)
    cov_term = np.einsum("l,al,abl->ab", sizes, params.Pi, diff2)
    graph_term = log_ratio * (sizes[:, None] * p - sizes[None, :] * q)
    D = graph_term + cov_term
    np.fill_diagonal(D, 0.0)
    off = D[~np.eye(K, dtype=bool)]
    return D, float(off.min()) if off.size else 0.0


@dataclass
class MetricReport:
    misclustering_rate: float
    nmi: float
    best_permutation: list
    delta2: list | None = None
    delta2_min: float | None = None
    negative_graph_term: bool = False

    def to_json(self):
        return json.dumps(asdict(self))


def evaluate(z_hat, z, params=None):
    rate, perm = misclustering_rate(z_hat, z)
    report = MetricReport(rate, nmi(z_hat, z), perm.tolist())
    if params is not None and params.symmetric_form() is not None:
        sizes = z.sizes if isinstance(z, Partition) else np.bincount(_labels(z), minlength=params.K)
        D, dmin = snr_delta2(params, sizes)
        p, q = params.symmetric_form()
        graph = math.log(p / q) * (sizes[:, None] * p - sizes[None, :] * q) if p != q else np.zeros_like(D)
        report.delta2, report.delta2_min = D.tolist(), dmin
        report.negative_graph_term = bool(np.any(graph[~np.eye(params.K, dtype=bool)] < 0))
    return report


def csv_rows(rows, columns):
    """Render dict rows as CSV text with a fixed column order and ``\\n`` line ends."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row.get(k)) for k in columns})
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return "" if v is None else v

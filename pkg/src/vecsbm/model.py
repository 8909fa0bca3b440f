"""Core types of the vectorial-edge-covariate SBM and its sampler.

A graph is stored once as an undirected edge list (``src < dst``) with one
covariate row per edge, plus a symmetric CSR index built on construction so
that neighbour iteration is O(degree).
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, InputError


@dataclass(frozen=True)
class Partition:
    assignments: np.ndarray
    K: int

    def __post_init__(self):
        z = np.asarray(self.assignments, dtype=np.int64).reshape(-1)
        z.setflags(write=False)
        object.__setattr__(self, "assignments", z)
        if self.K < 1:
            raise InputError(f"K must be positive, got {self.K}")
        if z.size and (z.min() < 0 or z.max() >= self.K):
            raise InputError(f"assignments must lie in [0, {self.K})")

    @property
    def n(self):
        return self.assignments.size

    @property
    def sizes(self):
        return np.bincount(self.assignments, minlength=self.K)

    def onehot(self):
        Z = np.zeros((self.n, self.K))
        Z[np.arange(self.n), self.assignments] = 1.0
        return Z

    def members(self, k):
        return np.flatnonzero(self.assignments == k)

    def is_balanced(self, alpha):
        sizes = self.sizes
        lo = self.n / (alpha * self.K)
        hi = alpha * self.n / self.K
        return bool(np.all((sizes >= lo) & (sizes <= hi)))

    def relabel(self, perm):
        """Return the partition with label ``k`` replaced by ``perm[k]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return Partition(perm[self.assignments], self.K)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.K == other.K and np.array_equal(self.assignments, other.assignments)

    def __hash__(self):
        return hash((self.K, self.assignments.tobytes()))


@dataclass(frozen=True)
class ModelParams:
    """Connectivity ``Pi`` (K,K), centroids ``Mu`` (K,K,d), covariances ``Sigma`` (K,K,d,d).

    ``flags`` carries estimator diagnostics such as blocks that fell back to
    global statistics; it plays no role in equality of the numeric arrays.
    """

    Pi: np.ndarray
    Mu: np.ndarray
    Sigma: np.ndarray
    flags: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("Pi", "Mu", "Sigma"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        K = self.Pi.shape[0]
        if self.Pi.shape != (K, K):
            raise InputError(f"Pi must be square, got {self.Pi.shape}")
        if self.Mu.ndim != 3 or self.Mu.shape[:2] != (K, K):
            raise InputError(f"Mu must have shape (K, K, d), got {self.Mu.shape}")
        d = self.Mu.shape[2]
        if self.Sigma.shape != (K, K, d, d):
            raise InputError(f"Sigma must have shape {(K, K, d, d)}, got {self.Sigma.shape}")

    @property
    def K(self):
        return self.Pi.shape[0]

    @property
    def d(self):
        return self.Mu.shape[2]

    def validate(self, ground_truth=False, atol=1e-12):
        """Raise ``InputError`` when a structural invariant fails."""
        if not np.allclose(self.Pi, self.Pi.T, atol=atol, rtol=0):
            raise InputError("Pi is not symmetric")
        if np.any(self.Pi < 0) or np.any(self.Pi > 1):
            raise InputError("Pi entries must lie in [0, 1]")
        if not np.allclose(self.Mu, self.Mu.transpose(1, 0, 2), atol=atol, rtol=0):
            raise InputError("Mu is not symmetric in its community indices")
        if not np.allclose(self.Sigma, self.Sigma.transpose(1, 0, 2, 3), atol=atol, rtol=0):
            raise InputError("Sigma is not symmetric in its community indices")
        if not np.allclose(self.Sigma, self.Sigma.transpose(0, 1, 3, 2), atol=atol, rtol=0):
            raise InputError("Sigma blocks are not symmetric matrices")
        eig_min = np.linalg.eigvalsh(self.Sigma).min() if self.K else 0.0
        if eig_min < -1e-10:
            raise InputError(f"Sigma block not PSD (min eigenvalue {eig_min:.3g})")
        if ground_truth and np.abs(self.Mu).max(initial=0.0) > 1.0:
            raise InputError("ground-truth centroids must satisfy max |mu| <= 1")

    def symmetric_form(self, atol=1e-12):
        """Return ``(p, q)`` when ``Pi = q 11^T + (p - q) I``, else ``None``."""
        K = self.K
        diag = np.diag(self.Pi)
        off = self.Pi[~np.eye(K, dtype=bool)]
        p = float(diag[0])
        q = float(off[0]) if off.size else p
        if np.allclose(diag, p, atol=atol, rtol=0) and (off.size == 0 or np.allclose(off, q, atol=atol, rtol=0)):
            return p, q
        return None

    def permuted(self, perm):
        """Parameters relabelled so that old community ``k`` becomes ``perm[k]``."""
        inv = np.argsort(perm)
        ix = np.ix_(inv, inv)
        return ModelParams(self.Pi[ix], self.Mu[ix], self.Sigma[ix], dict(self.flags))

    def digest(self):
        h = hashlib.sha256()
        for arr in (self.Pi, self.Mu, self.Sigma):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]

    def to_dict(self):
        return {"Pi": self.Pi.tolist(), "Mu": self.Mu.tolist(), "Sigma": self.Sigma.tolist()}


class CovGraph:
    """Undirected simple graph with a ``d``-vector covariate on every edge.

    ``src``, ``dst`` and ``cov`` describe each edge once with ``src < dst``;
    edges are kept sorted lexicographically.
    """

    def __init__(self, n, src, dst, cov):
        src = np.asarray(src, dtype=np.int64).reshape(-1)
        dst = np.asarray(dst, dtype=np.int64).reshape(-1)
        cov = np.asarray(cov, dtype=float)
        if cov.ndim == 1:
            cov = cov.reshape(-1, 1) if src.size else cov.reshape(0, max(cov.size, 1))
        if not (src.size == dst.size == cov.shape[0]):
            raise InputError("src, dst and cov must describe the same number of edges")
        if src.size:
            if np.any(src == dst):
                raise InputError("self-loops are not allowed")
            if min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n:
                raise InputError(f"edge endpoints must lie in [0, {n})")
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        order = np.lexsort((hi, lo))
        lo, hi, cov = lo[order], hi[order], cov[order]
        if lo.size > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                raise InputError("duplicate edges are not allowed")
        self.n = int(n)
        self.d = int(cov.shape[1])
        self.src, self.dst, self.cov = lo, hi, cov
        for arr in (self.src, self.dst, self.cov):
            arr.setflags(write=False)
        self._build_index()

    def _build_index(self):
        m = self.src.size
        rows = np.concatenate([self.src, self.dst])
        cols = np.concatenate([self.dst, self.src])
        eids = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((cols, rows))
        self.indptr = np.searchsorted(rows[order], np.arange(self.n + 1)).astype(np.int64)
        self.indices = cols[order]
        self.edge_ids = eids[order]

    @property
    def num_edges(self):
        return int(self.src.size)

    @property
    def nnz(self):
        """Non-zeros of the symmetric adjacency matrix (twice the edge count)."""
        return 2 * self.num_edges

    def degrees(self):
        return np.diff(self.indptr)

    def neighbors(self, i):
        """Return ``(neighbour ids, edge ids)`` of node ``i``."""
        a, b = self.indptr[i], self.indptr[i + 1]
        return self.indices[a:b], self.edge_ids[a:b]

    def edge_id(self, i, j):
        nbrs, eids = self.neighbors(i)
        pos = np.searchsorted(nbrs, j)
        if pos < nbrs.size and nbrs[pos] == j:
            return int(eids[pos])
        return None

    def adjacency(self, i, j):
        return 0 if i == j or self.edge_id(i, j) is None else 1

    def covariate(self, i, j):
        e = self.edge_id(i, j)
        if e is None:
            raise KeyError(f"no edge between {i} and {j}")
        return self.cov[e]

    def residual(self, i, j, partition, params):
        """Entry ``A_ij - P_ij`` of the noise matrix given ground truth."""
        if i == j:
            return 0.0
        z = partition.assignments
        return self.adjacency(i, j) - params.Pi[z[i], z[j]]

    def adjacency_matrix(self, dtype=float):
        m = self.num_edges
        data = np.ones(2 * m, dtype=dtype)
        rows = np.concatenate([self.src, self.dst])
        cols = np.concatenate([self.dst, self.src])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def edge_set(self):
        return set(zip(self.src.tolist(), self.dst.tolist()))

    def subgraph(self, nodes):
        """Induced subgraph on ``nodes`` with ids compacted in the given order."""
        nodes = np.asarray(nodes, dtype=np.int64)
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.size)
        keep = (remap[self.src] >= 0) & (remap[self.dst] >= 0)
        return CovGraph(nodes.size, remap[self.src[keep]], remap[self.dst[keep]], self.cov[keep])

    def with_covariates(self, cov):
        return CovGraph(self.n, self.src, self.dst, cov)

    def write_edgelist(self, path):
        """Write ``i j v_1 ... v_d`` lines (17 significant digits) after an ``n``/``d`` header."""
        with open(path, "w") as fh:
            fh.write(f"# n={self.n} d={self.d}\n")
            for i, j, v in zip(self.src.tolist(), self.dst.tolist(), self.cov):
                vals = " ".join(f"{x:.17g}" for x in v)
                fh.write(f"{i} {j} {vals}\n")

    @classmethod
    def read_edgelist(cls, path, n=None):
        header_n, header_d = None, None
        src, dst, rows = [], [], []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    for tok in line[1:].split():
                        key, _, val = tok.partition("=")
                        if key == "n":
                            header_n = int(val)
                        elif key == "d":
                            header_d = int(val)
                    continue
                parts = line.split()
                try:
                    src.append(int(parts[0]))
                    dst.append(int(parts[1]))
                    rows.append([float(x) for x in parts[2:]])
                except (ValueError, IndexError) as exc:
                    raise InputError(f"{path}:{lineno}: malformed edge line {line!r}") from exc
        d = header_d if header_d is not None else (len(rows[0]) if rows else 1)
        if any(len(r) != d for r in rows):
            raise InputError(f"{path}: inconsistent covariate dimension (expected {d})")
        if n is None:
            n = header_n if header_n is not None else (max(max(src), max(dst)) + 1 if src else 0)
        cov = np.array(rows, dtype=float).reshape(len(rows), d)
        return cls(n, src, dst, cov)


@dataclass
class VecSbmConfig:
    """Generative specification.

    Connectivity is either ``Pi`` or the pair ``(p, q)``. ``mu_mode`` is one of
    ``zero``, ``explicit`` (use ``Mu``) or ``uniform`` (entries drawn on
    ``[mu_low, mu_high]``). ``sigma_mode`` is ``identity``, ``explicit`` or
    ``random`` (random SPD, top singular value 1). ``balance`` is ``exact`` or
    ``multinomial``.
    """

    n: int
    K: int
    d: int = 1
    p: float | None = None
    q: float | None = None
    Pi: np.ndarray | None = None
    mu_mode: str = "zero"
    Mu: np.ndarray | None = None
    mu_low: float = -1.0
    mu_high: float = 1.0
    sigma_mode: str = "identity"
    Sigma: np.ndarray | None = None
    balance: str = "exact"
    seed: int = 0
    extra: dict = field(default_factory=dict, repr=False)

    def validate(self):
        if not (isinstance(self.n, (int, np.integer)) and isinstance(self.K, (int, np.integer))):
            raise ConfigError("n and K must be integers")
        if self.K < 2 or self.n < self.K:
            raise ConfigError(f"need n >= K >= 2, got n={self.n}, K={self.K}")
        if self.d < 1:
            raise ConfigError(f"d must be >= 1, got {self.d}")
        if self.Pi is None:
            if self.p is None or self.q is None:
                raise ConfigError("either Pi or both p and q are required")
            for name, v in (("p", self.p), ("q", self.q)):
                if not 0.0 < v < 1.0:
                    raise ConfigError(f"{name} must lie in (0, 1), got {v}")
        else:
            Pi = np.asarray(self.Pi, dtype=float)
            if Pi.shape != (self.K, self.K):
                raise ConfigError(f"Pi must be {self.K}x{self.K}")
            if not np.allclose(Pi, Pi.T) or Pi.min() < 0 or Pi.max() > 1:
                raise ConfigError("Pi must be symmetric with entries in [0, 1]")
        if self.mu_mode not in ("zero", "explicit", "uniform"):
            raise ConfigError(f"unknown mu mode {self.mu_mode!r}")
        if self.mu_mode == "explicit":
            Mu = np.asarray(self.Mu, dtype=float) if self.Mu is not None else None
            if Mu is None or Mu.shape != (self.K, self.K, self.d):
                raise ConfigError(f"explicit Mu must have shape {(self.K, self.K, self.d)}")
            if not np.allclose(Mu, Mu.transpose(1, 0, 2)):
                raise ConfigError("explicit Mu must be symmetric in community indices")
        if self.mu_mode == "uniform" and not self.mu_low < self.mu_high:
            raise ConfigError("uniform centroids need mu_low < mu_high")
        if self.sigma_mode not in ("identity", "explicit", "random"):
            raise ConfigError(f"unknown sigma mode {self.sigma_mode!r}")
        if self.sigma_mode == "explicit":
            S = np.asarray(self.Sigma, dtype=float) if self.Sigma is not None else None
            if S is None or S.shape != (self.K, self.K, self.d, self.d):
                raise ConfigError(f"explicit Sigma must have shape {(self.K, self.K, self.d, self.d)}")
        if self.balance not in ("exact", "multinomial"):
            raise ConfigError(f"unknown balance mode {self.balance!r}")

    def connectivity(self):
        if self.Pi is not None:
            return np.asarray(self.Pi, dtype=float)
        return self.q * np.ones((self.K, self.K)) + (self.p - self.q) * np.eye(self.K)

    @classmethod
    def from_mapping(cls, kv):
        """Build a config from flat string keys (see :func:`read_flat_config`)."""
        kv = dict(kv)
        try:
            n, K = int(kv.pop("n")), int(kv.pop("K"))
        except KeyError as exc:
            raise ConfigError(f"missing required key {exc.args[0]!r}") from None
        d = int(kv.pop("d", 1))
        scale = kv.pop("pq_scale", "none").strip()
        if scale == "none":
            factor = 1.0
        elif scale in ("logn/n", "log(n)/n"):
            factor = math.log(n) / n
        else:
            raise ConfigError(f"unknown pq_scale {scale!r}")
        cfg = cls(n=n, K=K, d=d, seed=int(kv.pop("seed", 0)), balance=kv.pop("balance", "exact"))
        if "p" in kv:
            cfg.p = float(kv.pop("p")) * factor
        if "q" in kv:
            q = kv.pop("q")
            cfg.q = cfg.p * float(q[2:]) if q.startswith("p*") else float(q) * factor
        pi_keys = [k for k in kv if k.startswith("pi.")]
        if pi_keys:
            Pi = np.zeros((K, K))
            for key in pi_keys:
                a, b = _pair_index(key, K)
                Pi[a, b] = Pi[b, a] = float(kv.pop(key)) * factor
            cfg.Pi = Pi
        cfg.mu_mode = kv.pop("mu.mode", "zero")
        cfg.mu_low = float(kv.pop("mu.low", -1.0))
        cfg.mu_high = float(kv.pop("mu.high", 1.0))
        mu_keys = [k for k in kv if k.startswith("mu.")]
        if mu_keys:
            Mu = np.zeros((K, K, d))
            for key in mu_keys:
                a, b = _pair_index(key, K)
                vec = _floats(kv.pop(key), d, key)
                Mu[a, b] = Mu[b, a] = vec
            cfg.Mu = Mu
            if cfg.mu_mode == "zero":
                cfg.mu_mode = "explicit"
        cfg.sigma_mode = kv.pop("sigma.mode", "identity")
        sigma_keys = [k for k in kv if k.startswith("sigma.")]
        if sigma_keys:
            S = np.broadcast_to(np.eye(d), (K, K, d, d)).copy()
            for key in sigma_keys:
                a, b = _pair_index(key, K)
                S[a, b] = S[b, a] = _floats(kv.pop(key), d * d, key).reshape(d, d)
            cfg.Sigma = S
        cfg.extra = kv
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path):
        return cls.from_mapping(read_flat_config(path))


def _pair_index(key, K):
    parts = key.split(".")
    try:
        a, b = int(parts[1]), int(parts[2])
    except (IndexError, ValueError):
        raise ConfigError(f"bad community-pair key {key!r}") from None
    if not (0 <= a < K and 0 <= b < K) or len(parts) != 3:
        raise ConfigError(f"bad community-pair key {key!r}")
    return a, b


def _floats(text, size, key):
    vals = np.array([float(x) for x in text.split(",")])
    if vals.size != size:
        raise ConfigError(f"{key}: expected {size} values, got {vals.size}")
    return vals


def read_flat_config(path):
    """Read ``key = value`` lines (``#`` comments) into a dict of strings."""
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=", ":"))
    parser.optionxform = str
    try:
        parser.read_string("[root]\n" + Path(path).read_text())
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return dict(parser["root"])


def random_spd(d, rng):
    """Random SPD matrix: random orthogonal basis, eigenvalues in (0, 1], top eigenvalue 1."""
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    Q = Q * np.sign(np.diag(R))
    vals = 1.0 - rng.uniform(0.0, 1.0, size=d)
    vals = vals / vals.max()
    return (Q * vals) @ Q.T


def _triu_decode(idx, s):
    """Map linear indices of strict upper-triangle pairs of an ``s``-set to ``(i, j)``."""
    idx = np.asarray(idx, dtype=np.int64)
    b = 2 * s - 1
    i = np.floor((b - np.sqrt(np.maximum(b * b - 8.0 * idx, 0.0))) / 2).astype(np.int64)
    offset = lambda r: r * (2 * s - r - 1) // 2  # noqa: E731
    i = np.where(offset(i) > idx, i - 1, i)
    i = np.where(offset(i + 1) <= idx, i + 1, i)
    j = idx - offset(i) + i + 1
    return i, j


def _balanced_labels(cfg, rng):
    if cfg.balance == "exact":
        sizes = np.full(cfg.K, cfg.n // cfg.K)
        sizes[: cfg.n % cfg.K] += 1
        return np.repeat(np.arange(cfg.K), sizes)
    return rng.integers(0, cfg.K, size=cfg.n)


def sample_vecsbm(config):
    """Draw ``(graph, truth, params)`` from the model described by ``config``.

    Block pairs are visited in lexicographic order ``k <= k'``; for each one
    the edge count is drawn from its binomial law, the edges are chosen
    uniformly among the candidate pairs, and covariates ``mu + L eps`` are
    attached with ``L`` the Cholesky factor of the block covariance.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    K, d = config.K, config.d
    Pi = config.connectivity()

    if config.mu_mode == "zero":
        Mu = np.zeros((K, K, d))
    elif config.mu_mode == "explicit":
        Mu = np.asarray(config.Mu, dtype=float).copy()
    else:
        Mu = np.zeros((K, K, d))
        for a in range(K):
            for b in range(a, K):
                Mu[a, b] = Mu[b, a] = rng.uniform(config.mu_low, config.mu_high, size=d)

    if config.sigma_mode == "identity":
        Sigma = np.broadcast_to(np.eye(d), (K, K, d, d)).copy()
    elif config.sigma_mode == "explicit":
        Sigma = np.asarray(config.Sigma, dtype=float).copy()
    else:
        Sigma = np.zeros((K, K, d, d))
        for a in range(K):
            for b in range(a, K):
                Sigma[a, b] = Sigma[b, a] = random_spd(d, rng)

    z = _balanced_labels(config, rng)
    members = [np.flatnonzero(z == k) for k in range(K)]

    srcs, dsts, covs = [], [], []
    for a in range(K):
        for b in range(a, K):
            ma, mb = members[a], members[b]
            total = ma.size * (ma.size - 1) // 2 if a == b else ma.size * mb.size
            if total == 0:
                continue
            m = rng.binomial(total, Pi[a, b])
            picks = np.sort(rng.choice(total, size=m, replace=False))
            if a == b:
                ii, jj = _triu_decode(picks, ma.size)
                u, v = ma[ii], ma[jj]
            else:
                u, v = ma[picks // mb.size], mb[picks % mb.size]
            try:
                L = np.linalg.cholesky(Sigma[a, b])
            except np.linalg.LinAlgError:
                raise ConfigError(f"Sigma[{a},{b}] is not positive definite") from None
            eps = rng.standard_normal((m, d)) @ L.T
            srcs.append(u)
            dsts.append(v)
            covs.append(Mu[a, b] + eps)

    if srcs:
        graph = CovGraph(config.n, np.concatenate(srcs), np.concatenate(dsts), np.vstack(covs))
    else:
        graph = CovGraph(config.n, [], [], np.zeros((0, d)))
    return graph, Partition(z, K), ModelParams(Pi, Mu, Sigma)


@dataclass(frozen=True)
class AssumptionReport:
    balanced: bool
    isotropic: bool
    symmetric_sbm: bool
    p: float | None
    q: float | None
    p_equals_q: bool
    degree_ratio: float | None  # n p / log n; Omega(log n) regime needs this bounded below
    exact_recovery_ratio: float | None  # n (sqrt p - sqrt q)^2 / K / log n; < 1 means limited graph info

    def to_dict(self):
        return dict(self.__dict__)


def check_assumptions(graph, partition, params, alpha):
    """Diagnostic flags for balance, isotropy, symmetric connectivity and sparsity regime."""
    n, K = partition.n, partition.K
    d = params.d
    isotropic = bool(np.allclose(params.Sigma, np.broadcast_to(np.eye(d), params.Sigma.shape), atol=1e-12, rtol=0))
    form = params.symmetric_form()
    p = q = degree_ratio = exact_ratio = None
    if form is not None:
        p, q = form
        log_n = math.log(n) if n > 1 else float("nan")
        degree_ratio = n * p / log_n
        exact_ratio = n * (math.sqrt(p) - math.sqrt(q)) ** 2 / K / log_n
    return AssumptionReport(
        balanced=partition.is_balanced(alpha),
        isotropic=isotropic,
        symmetric_sbm=form is not None,
        p=p,
        q=q,
        p_equals_q=form is not None and p == q,
        degree_ratio=degree_ratio,
        exact_recovery_ratio=exact_ratio,
    )


@dataclass
class IterationRecord:
    partition: Partition
    params: ModelParams | None
    metrics: dict = field(default_factory=dict)
    changed_nodes: int = 0


@dataclass
class RunTrace:
    """Per-iteration record of one refinement run; entry 0 is the initial partition."""

    iterations: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def final(self):
        return self.iterations[-1].partition

    @property
    def n_iter(self):
        return len(self.iterations) - 1

    def to_dict(self):
        rows = []
        for rec in self.iterations:
            rows.append(
                {
                    "nmi": rec.metrics.get("nmi"),
                    "misclustering_rate": rec.metrics.get("misclustering_rate"),
                    "changed_nodes": int(rec.changed_nodes),
                    "param_snapshot_digest": rec.params.digest() if rec.params is not None else None,
                }
            )
        return {
            "iterations": rows,
            "final_partition": self.final.assignments.tolist(),
            "n_iter": self.n_iter,
            "timings": self.timings,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

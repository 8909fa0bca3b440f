"""Monte-Carlo checks of the stochastic error term, the oracle error and the rate curve.

The stochastic term of node ``i`` in community ``a`` against ``b`` is

    C_i(a,b) = log(p/q) (sum_{C_a} E_ij - sum_{C_b} E_ij)
               + sum_l sum_{j in C_l, j != i} (E_ij ||mu_al - mu_bl||^2 + 2 A_ij <eps_ij, mu_al - mu_bl>)

with ``E = A - Pi``. Only the per-community neighbour counts of row ``i``
enter, and given a count ``N_l`` the Gaussian inner products sum to a
single normal draw, so each realisation costs O(K) instead of O(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import InputError
from .metrics import misclustering_rate, snr_delta2
from .model import ModelParams, VecSbmConfig, sample_vecsbm
from .refine import RefineOptions, ir_vec
from .spectral import spectral_init


def wilson_interval(successes, trials, z=1.96):
    if trials <= 0:
        raise InputError("trials must be positive")
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _pq(params):
    form = params.symmetric_form()
    if form is None:
        raise InputError("stochastic term needs a symmetric SBM connectivity")
    return form


def sample_ci(a, b, params, sizes, rng, size=None):
    """Draw realisations of ``C_i(a, b)`` for a fresh row ``i`` in community ``a``."""
    if a == b:
        raise InputError("a and b must differ")
    p, q = _pq(params)
    sizes = np.asarray(sizes, dtype=np.int64)
    K = params.K
    shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
    others = sizes - (np.arange(K) == a)
    probs = params.Pi[a]
    counts = rng.binomial(others, probs, size=shape + (K,))
    centred = counts - others * probs
    dmu = params.Mu[a] - params.Mu[b]  # (K, d): mu_al - mu_bl
    dist2 = (dmu**2).sum(-1)
    # Var <eps, dmu> = dmu^T Sigma_al dmu
    spread = np.einsum("lc,lcd,ld->l", dmu, params.Sigma[a], dmu)
    noise = rng.standard_normal(shape + (K,)) * np.sqrt(counts * spread)
    diff = centred[..., a] - centred[..., b]
    if p == q:
        graph = np.zeros(shape)
    else:
        log_ratio = math.log(p / q) if q > 0 and p > 0 else math.copysign(math.inf, p - q)
        with np.errstate(invalid="ignore"):
            graph = np.where(diff == 0, 0.0, log_ratio * diff)
    value = graph + (centred * dist2).sum(-1) + 2.0 * noise.sum(-1)
    return float(value) if size is None else value


@dataclass
class OracleEstimate:
    delta: float
    xi_hat: float  # Monte-Carlo estimate of xi(delta) / n
    p_omega1: np.ndarray  # (K, K), nan on the diagonal
    ci_low: np.ndarray
    ci_high: np.ndarray
    trials: int
    delta2: np.ndarray
    delta2_min: float
    fitted_c: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def p_min_pair(self):
        """Tail frequency and interval for the pair attaining ``delta2_min``."""
        K = self.delta2.shape[0]
        masked = np.where(np.eye(K, dtype=bool), np.inf, self.delta2)
        a, b = np.unravel_index(np.argmin(masked), masked.shape)
        return self.p_omega1[a, b], self.ci_low[a, b], self.ci_high[a, b]


def estimate_oracle_tail(params, sizes, delta, trials, seed=0):
    """Frequency of ``C_i(a,b) <= -(1 - delta) Delta^2(a,b)`` for every ordered pair."""
    if not 0.0 < delta <= 0.5:
        raise InputError(f"delta must lie in (0, 1/2], got {delta}")
    if trials < 1:
        raise InputError("trials must be >= 1")
    sizes = np.asarray(sizes, dtype=np.int64)
    K = params.K
    D, dmin = snr_delta2(params, sizes)
    P = np.full((K, K), np.nan)
    lo = np.full((K, K), np.nan)
    hi = np.full((K, K), np.nan)
    streams = iter(np.random.SeedSequence(seed).spawn(K * K))
    for a in range(K):
        for b in range(K):
            rng = np.random.default_rng(next(streams))
            if a == b:
                continue
            draws = sample_ci(a, b, params, sizes, rng, size=trials)
            hits = int(np.count_nonzero(draws <= -(1.0 - delta) * D[a, b]))
            P[a, b] = hits / trials
            lo[a, b], hi[a, b] = wilson_interval(hits, trials)
    weights = sizes / sizes.sum()
    xi = float(np.nansum(weights[:, None] * D * P))
    return OracleEstimate(delta, xi, P, lo, hi, trials, D, dmin)


def fit_line(x, y):
    """Least-squares ``y = slope * x + intercept``; returns ``(slope, intercept, r2)``."""
    res = stats.linregress(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return float(res.slope), float(res.intercept), float(res.rvalue**2)


def two_block_params(n, p, q, delta2, d=1):
    """Balanced K=2 parameters with ``mu_00 = s, mu_11 = -s, mu_01 = 0`` and
    ``s`` chosen so that ``Delta^2_min`` equals ``delta2``."""
    sizes = np.array([n - n // 2, n // 2])
    Pi = q * np.ones((2, 2)) + (p - q) * np.eye(2)
    base = ModelParams(Pi, np.zeros((2, 2, d)), np.broadcast_to(np.eye(d), (2, 2, d, d)))
    _, graph_min = snr_delta2(base, sizes)
    # covariate term per unit s^2 for the pair (0, 1) and (1, 0)
    per_unit = d * min(sizes[0] * p + sizes[1] * q, sizes[1] * p + sizes[0] * q)
    s = math.sqrt(max(delta2 - graph_min, 0.0) / per_unit)
    Mu = np.zeros((2, 2, d))
    Mu[0, 0], Mu[1, 1] = s, -s
    return ModelParams(Pi, Mu, base.Sigma), sizes


def oracle_tail_sweep(n, p, q, delta2_values, delta=0.5, trials=100_000, seed=0):
    """Tail frequencies along a ``Delta^2_min`` sweep with the fitted exponent attached."""
    out = []
    for i, target in enumerate(delta2_values):
        params, sizes = two_block_params(n, p, q, target)
        out.append(estimate_oracle_tail(params, sizes, delta, trials, seed=seed + i))
    xs, ys = [], []
    for est in out:
        phat = est.p_min_pair[0]
        if phat > 0:
            xs.append(est.delta2_min)
            ys.append(-math.log(phat))
    c = fit_line(xs, ys)[0] if len(xs) >= 2 else None
    for est in out:
        est.fitted_c = c
    return out


def rate_configs(n, p, q, delta2_values, d=1, seed=0):
    """``p == q`` style sweep of two-community configs hitting each target signal."""
    configs = []
    for target in delta2_values:
        params, _ = two_block_params(n, p, q, target, d=d)
        configs.append(
            VecSbmConfig(n=n, K=2, d=d, p=p, q=q, mu_mode="explicit", Mu=np.array(params.Mu), seed=seed)
        )
    return configs


RATE_COLUMNS = ("delta2_min", "r_hat", "r_hat_ci_lo", "r_hat_ci_hi", "p_omega1", "n", "K", "p", "q", "seed_count")


def rate_curve(configs, options=RefineOptions(), seeds=20, tail_trials=0, delta=0.5):
    """Mean misclustering rate of spectral + refinement for each config.

    Returns ``(rows, fit)`` where ``rows`` follow :data:`RATE_COLUMNS` and
    ``fit`` is ``(slope, intercept, r2)`` of ``log r_hat`` against
    ``Delta^2_min`` over points with ``r_hat > 0`` (``None`` with fewer than
    two such points). The interval is a normal approximation over seeds.
    """
    rows = []
    for cfg in configs:
        rates = []
        delta2_min = None
        p = q = None
        for s in range(seeds):
            cfg_s = VecSbmConfig(**{**cfg.__dict__, "seed": cfg.seed * 100_003 + s})
            graph, truth, params = sample_vecsbm(cfg_s)
            if delta2_min is None:
                _, delta2_min = snr_delta2(params, truth.sizes)
                p, q = params.symmetric_form()
            init = spectral_init(graph, cfg.K, seed=s)
            final = ir_vec(graph, cfg.K, init, options).final
            rates.append(misclustering_rate(final, truth)[0])
        rates = np.array(rates)
        mean = float(rates.mean())
        half = 1.96 * float(rates.std(ddof=1)) / math.sqrt(seeds) if seeds > 1 else 0.0
        p_tail = None
        if tail_trials:
            params_t, sizes_t = two_block_params(cfg.n, p, q, delta2_min, d=cfg.d) if cfg.K == 2 else (params, truth.sizes)
            p_tail = estimate_oracle_tail(params_t, sizes_t, delta, tail_trials, seed=cfg.seed).p_min_pair[0]
        rows.append(
            {
                "delta2_min": delta2_min,
                "r_hat": mean,
                "r_hat_ci_lo": max(0.0, mean - half),
                "r_hat_ci_hi": min(1.0, mean + half),
                "p_omega1": p_tail,
                "n": cfg.n,
                "K": cfg.K,
                "p": p,
                "q": q,
                "seed_count": seeds,
            }
        )
    pts = [(r["delta2_min"], math.log(r["r_hat"])) for r in rows if r["r_hat"] > 0]
    fit = fit_line(*zip(*pts)) if len(pts) >= 2 else None
    return rows, fit

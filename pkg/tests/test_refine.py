import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import strong_two_block, two_cliques
from vecsbm.errors import InputError, NumericError, PartitionError
from vecsbm.metrics import misclustering_rate
from vecsbm.model import CovGraph, ModelParams, Partition, VecSbmConfig, random_spd, sample_vecsbm
from vecsbm.refine import (
    RefineOptions,
    estimate_params,
    group_sum,
    ir_vec,
    map_score,
    map_scores,
    oracle_step,
    refine_step,
)
from vecsbm.spectral import spectral_init

ISO = RefineOptions()
FULL = RefineOptions(mode="full")


def brute_force_score(i, k, graph, params, partition, mode, eps):
    """Direct O(n) evaluation over every other node."""
    A = graph.adjacency_matrix().toarray()
    z = partition.assignments
    Pi = np.clip(params.Pi, eps, 1 - eps)
    total = 0.0
    for j in range(graph.n):
        if j == i:
            continue
        l = z[j]
        total += A[i, j] * math.log(Pi[k, l]) + (1 - A[i, j]) * math.log(1 - Pi[k, l])
        if A[i, j]:
            r = graph.covariate(i, j) - params.Mu[k, l]
            if mode == "full":
                S = params.Sigma[k, l]
                total -= r @ np.linalg.solve(S, r) + 0.5 * np.linalg.slogdet(S)[1]
            else:
                total -= r @ r
    return total


def four_node_example():
    g = CovGraph(4, [0, 2, 1], [1, 3, 2], [[2.0], [4.0], [1.0]])
    return g, Partition([0, 0, 1, 1], 2)


def test_four_node_estimates():
    g, z = four_node_example()
    params = estimate_params(g, z)
    # independent route: pseudo-inverse of the membership matrix
    W = np.linalg.pinv(z.onehot().astype(float))
    A = g.adjacency_matrix().toarray()
    assert np.allclose(params.Pi, W @ A @ W.T)
    assert params.Pi[0, 0] == pytest.approx(0.5)
    assert params.Pi[0, 1] == pytest.approx(0.25)
    assert params.Mu[0, 0, 0] == 2.0 and params.Mu[1, 1, 0] == 4.0
    assert params.Mu[0, 1, 0] == params.Mu[1, 0, 0] == 1.0


def test_mean_estimates_close_to_truth(scenario1_samples):
    g, z, truth = scenario1_samples[0]
    params = estimate_params(g, z)
    zz = z.assignments
    counts = np.zeros((3, 3))
    np.add.at(counts, (zz[g.src], zz[g.dst]), 1)
    counts = counts + counts.T - np.diag(np.diag(counts))
    err = np.linalg.norm(params.Mu - truth.Mu, axis=-1)
    assert np.all(err <= 5 * math.sqrt(3) / np.sqrt(counts))


def test_isotropic_covariance_is_identity(scenario1_samples):
    g, z, _ = scenario1_samples[0]
    params = estimate_params(g, z)
    assert np.array_equal(params.Sigma, np.broadcast_to(np.eye(3), (3, 3, 3, 3)))


def test_full_covariance_estimate():
    rng = np.random.default_rng(3)
    S = random_spd(2, rng)
    Sigma = np.broadcast_to(S, (2, 2, 2, 2)).copy()
    cfg = VecSbmConfig(n=400, K=2, d=2, p=0.2, q=0.1, sigma_mode="explicit", Sigma=Sigma, seed=1)
    g, z, _ = sample_vecsbm(cfg)
    params = estimate_params(g, z, FULL)
    for a in range(2):
        for b in range(2):
            assert np.linalg.norm(params.Sigma[a, b] - S, 2) <= 0.15
            assert np.allclose(params.Sigma[a, b], params.Sigma[a, b].T)


def test_estimates_are_symmetric():
    g, z, _ = strong_two_block(n=120, d=2, seed=8)
    for opts in (ISO, FULL):
        params = estimate_params(g, z, opts)
        assert np.array_equal(params.Pi, params.Pi.T)
        assert np.array_equal(params.Mu, np.swapaxes(params.Mu, 0, 1))
        assert np.array_equal(params.Sigma, np.swapaxes(params.Sigma, 0, 1))


def test_empty_block_fallback():
    g, z = two_cliques(3, value=2.5)
    params = estimate_params(g, z)
    assert params.flags["empty_blocks"] == [(0, 1)]
    assert params.Mu[0, 1, 0] == 2.5
    assert params.Pi[0, 1] == pytest.approx(1 / 36)


def test_empty_community_rejected():
    g, _ = two_cliques(2)
    with pytest.raises(PartitionError):
        estimate_params(g, Partition([0, 0, 0, 0], 2))


def test_isolated_node_score():
    g = CovGraph(5, [0, 2], [1, 3], [[1.0], [1.0]])
    z = Partition([0, 0, 1, 1, 1], 2)
    params = estimate_params(g, z)
    eps = ISO.clamp_for(5)
    Pi = np.clip(params.Pi, eps, 1 - eps)
    scores = map_scores(g, params, z)
    for k in range(2):
        expected = 2 * math.log1p(-Pi[k, 0]) + 2 * math.log1p(-Pi[k, 1])
        assert scores[4, k] == pytest.approx(expected)


def test_single_edge_covariate_gap():
    g = CovGraph(4, [0], [1], [[1.0]])
    z = Partition([0, 0, 1, 1], 2)
    Mu = np.zeros((2, 2, 1))
    Mu[0, 0], Mu[1, 0] = 1.0, -1.0
    Mu[0, 1] = Mu[1, 0]
    params = ModelParams(np.full((2, 2), 0.3), Mu, np.ones((2, 2, 1, 1)))
    graph_only = RefineOptions(use_covariates=False)
    s = map_scores(g, params, z)
    s0 = map_scores(g, params, z, graph_only)
    # node 1's only neighbour is node 0 in community 0
    assert (s[1, 0] - s0[1, 0]) - (s[1, 1] - s0[1, 1]) == pytest.approx(4.0)


@pytest.mark.parametrize("mode", ["isotropic", "full"])
def test_scores_match_brute_force(mode):
    opts = RefineOptions(mode=mode)
    cfg = VecSbmConfig(n=40, K=3, d=2, p=0.3, q=0.1, mu_mode="uniform", sigma_mode="random", seed=13)
    g, z, truth = sample_vecsbm(cfg)
    params = estimate_params(g, z, opts)
    eps = opts.clamp_for(g.n)
    fast = map_scores(g, params, z, opts)
    for i in range(0, g.n, 3):
        for k in range(3):
            slow = brute_force_score(i, k, g, params, z, mode, eps)
            single = map_score(i, k, g, params, z, opts)
            assert fast[i, k] == pytest.approx(slow, rel=1e-9, abs=1e-9)
            assert single == pytest.approx(slow, rel=1e-9, abs=1e-9)


def test_full_mode_with_identity_covariance_matches_isotropic():
    agree = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        K = int(rng.integers(2, 5))
        cfg = VecSbmConfig(n=30, K=K, d=2, p=0.4, q=0.15, mu_mode="uniform", seed=seed)
        g, z, _ = sample_vecsbm(cfg)
        labels = rng.integers(0, K, size=30)
        labels[:K] = np.arange(K)
        part = Partition(labels, K)
        params = estimate_params(g, part)
        iso = map_scores(g, params, part, ISO)
        full = map_scores(g, params, part, FULL)
        assert np.allclose(iso, full, rtol=1e-12, atol=1e-10)
        agree += np.array_equal(iso.argmax(1), full.argmax(1))
    assert agree == 100


def test_truth_is_fixpoint_on_separated_cliques():
    g, truth = two_cliques(50)
    cov = np.where(truth.assignments[g.src] == 0, 1.0, -1.0)[:, None]
    g = g.with_covariates(cov)
    for opts in (ISO, RefineOptions(mode="full", cov_ridge=1e-3)):
        new, _ = refine_step(g, truth, opts)
        assert new == truth


def test_single_flip_is_corrected():
    g, z, _ = strong_two_block(n=200, p=0.3, q=0.05, seed=2)
    labels = z.assignments.copy()
    labels[17] = 1 - labels[17]
    new, _ = refine_step(g, Partition(labels, 2))
    assert new == z


def test_refinement_improves_spectral_start(scenario1_samples):
    better = 0
    for s, (g, z, _) in enumerate(scenario1_samples):
        init = spectral_init(g, 3, seed=s)
        final = ir_vec(g, 3, init, RefineOptions(T=3)).final
        better += misclustering_rate(final, z)[0] < misclustering_rate(init, z)[0]
    assert better >= 18


def test_trace_length_and_json():
    g, z, _ = strong_two_block(n=100, seed=1)
    trace = ir_vec(g, 2, z, RefineOptions(T=4), truth=z)
    assert trace.n_iter == 4 and len(trace.iterations) == 5
    data = json.loads(trace.to_json())
    assert len(data["iterations"]) == 5
    assert data["iterations"][0]["param_snapshot_digest"] is None
    assert all(len(it["param_snapshot_digest"]) == 16 for it in data["iterations"][1:])
    assert data["final_partition"] == trace.final.assignments.tolist()
    assert data["iterations"][-1]["nmi"] == pytest.approx(1.0)


def test_convergence_stops_early():
    g, z, _ = strong_two_block(n=100, seed=1)
    trace = ir_vec(g, 2, z, RefineOptions(T=10, convergence=True))
    assert len(trace.iterations) == 2
    assert trace.iterations[-1].changed_nodes == 0


def test_wrong_k_rejected():
    g, z, _ = strong_two_block(n=50, seed=1)
    with pytest.raises(InputError):
        ir_vec(g, 3, z)


def test_ties_and_empty_cluster_policies():
    # without edges every score ties, ties go to community 0 and community 1 empties
    g = CovGraph(6, [], [], np.zeros((0, 1)))
    start = Partition([0, 0, 0, 1, 1, 1], 2)
    params = estimate_params(g, start)
    scores = map_scores(g, params, start)
    assert np.all(scores[:, 0] == scores[:, 1])
    new, _ = refine_step(g, start, RefineOptions(empty_cluster_policy="reseed"))
    assert new.sizes.tolist() == [5, 1]
    with pytest.raises(PartitionError):
        refine_step(g, start, RefineOptions(empty_cluster_policy="abort"))


def test_degenerate_covariance_raises_numeric_error():
    g, z, _ = strong_two_block(n=60, d=2, seed=3)
    g = g.with_covariates(np.ones((g.num_edges, 2)))
    with pytest.raises(NumericError):
        refine_step(g, z, RefineOptions(mode="full", cov_ridge=0.0))
    new, _ = refine_step(g, z, RefineOptions(mode="full", cov_ridge=1e-3))
    assert new.n == 60


def test_invalid_options():
    for kwargs in (dict(mode="diag"), dict(T=0), dict(prob_clamp=0.7), dict(cov_ridge=-1.0), dict(empty_cluster_policy="x")):
        with pytest.raises(InputError):
            RefineOptions(**kwargs)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.permutations([0, 1, 2]), st.sampled_from(["isotropic", "full"]))
def test_permutation_equivariance(seed, perm, mode):
    opts = RefineOptions(mode=mode)
    cfg = VecSbmConfig(n=60, K=3, d=2, p=0.3, q=0.1, mu_mode="uniform", seed=seed)
    g, z, _ = sample_vecsbm(cfg)
    rng = np.random.default_rng(seed)
    start = Partition(np.where(rng.random(60) < 0.2, rng.integers(0, 3, 60), z.assignments), 3)
    if np.any(start.sizes == 0):
        return
    perm = np.array(perm)
    p1 = estimate_params(g, start, opts)
    p2 = estimate_params(g, start.relabel(perm), opts)
    assert np.allclose(p1.permuted(perm).Pi, p2.Pi)
    assert np.allclose(p1.permuted(perm).Mu, p2.Mu)
    new1, _ = refine_step(g, start, opts)
    new2, _ = refine_step(g, start.relabel(perm), opts)
    if np.all(np.bincount(new1.assignments, minlength=3) > 0):
        assert new1.relabel(perm) == new2


@settings(max_examples=200, deadline=None)
@given(
    st.integers(0, 10_000),
    st.integers(2, 4),
    st.integers(1, 3),
    st.floats(0.01, 0.9),
    st.sampled_from(["isotropic", "full"]),
)
def test_no_nan_on_random_inputs(seed, K, d, p, mode):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(K + 2, 40))
    cfg = VecSbmConfig(n=n, K=K, d=d, p=p, q=p / 2, mu_mode="uniform", sigma_mode="random", seed=seed)
    g, _, _ = sample_vecsbm(cfg)
    labels = rng.integers(0, K, n)
    labels[:K] = np.arange(K)
    part = Partition(labels, K)
    opts = RefineOptions(mode=mode)
    params = estimate_params(g, part, opts)
    assert np.all(np.isfinite(params.Pi)) and np.all(np.isfinite(params.Mu)) and np.all(np.isfinite(params.Sigma))
    scores = map_scores(g, params, part, opts)
    assert np.all(np.isfinite(scores))


def test_full_mode_with_fewer_edges_than_dimensions():
    g = CovGraph(6, [0], [1], [[0.3, -0.2]])
    part = Partition([0, 0, 0, 1, 1, 1], 2)
    params = estimate_params(g, part, FULL)
    assert params.flags["thin_blocks"] == [(0, 0), (0, 1), (1, 1)]
    assert np.allclose(params.Sigma[0, 1], np.eye(2) * (1 + 1e-6))
    assert np.all(np.isfinite(map_scores(g, params, part, FULL)))


def test_operation_count_linear_in_edges():
    counts = []
    for p in (0.02, 0.04, 0.08):
        g, z, _ = sample_vecsbm(VecSbmConfig(n=2000, K=4, d=3, p=p, q=p / 2, seed=0))
        ops = {}
        refine_step(g, z, RefineOptions(mode="full"), ops=ops)
        counts.append((g.nnz, ops["estimate"] + ops["assign"]))
    for (e0, c0), (e1, c1) in zip(counts, counts[1:]):
        assert c1 / c0 <= 1.1 * e1 / e0


def test_group_sum_matches_loop():
    rng = np.random.default_rng(0)
    keys = rng.integers(0, 5, 100)
    vals = rng.standard_normal((100, 3))
    expected = np.array([vals[keys == k].sum(0) for k in range(5)])
    assert np.allclose(group_sum(keys, vals, 5), expected)
    assert np.allclose(group_sum(keys, vals[:, 0], 5), expected[:, 0])


def test_oracle_step_recovers_strong_signal():
    g, z, params = strong_two_block(n=200, p=0.3, q=0.05, seed=6)
    out = oracle_step(g, z, params)
    assert misclustering_rate(out, z)[0] <= 0.01

import math
import os

import numpy as np
import pytest
from hypothesis import settings

from vecsbm.io_bench import scenario1_config
from vecsbm.model import CovGraph, Partition, VecSbmConfig, sample_vecsbm

# fixed example sequence by default; HYPOTHESIS_PROFILE=explore for fresh random searches
settings.register_profile("default", deadline=None, derandomize=True)
settings.register_profile("explore", deadline=None, max_examples=1000)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def two_cliques(size=2, d=1, value=0.0):
    """Two disjoint cliques of ``size`` nodes each, constant covariates."""
    src, dst = [], []
    for base in (0, size):
        for i in range(size):
            for j in range(i + 1, size):
                src.append(base + i)
                dst.append(base + j)
    cov = np.full((len(src), d), value)
    truth = Partition(np.repeat([0, 1], size), 2)
    return CovGraph(2 * size, src, dst, cov), truth


@pytest.fixture
def cliques():
    return two_cliques


@pytest.fixture(scope="session")
def scenario1_samples():
    out = []
    for seed in range(20):
        cfg = scenario1_config()
        cfg.seed = seed
        out.append(sample_vecsbm(cfg))
    return out


def strong_two_block(n=200, p=0.3, q=0.05, d=1, sep=1.0, seed=0):
    Mu = np.zeros((2, 2, d))
    Mu[0, 0], Mu[1, 1] = sep, -sep
    cfg = VecSbmConfig(n=n, K=2, d=d, p=p, q=q, mu_mode="explicit", Mu=Mu, seed=seed)
    return sample_vecsbm(cfg)


ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion():
    """Record one PASS/FAIL/SKIP line for the acceptance summary."""

    def record(number, status, detail):
        line = f"criterion {number}: {status} | {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

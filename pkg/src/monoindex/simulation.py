"""
Data generation for the two simulation models and the Monte Carlo harness.

Random streams come from the counter-based Philox generator. Replication
``r`` of a study with master seed ``s`` draws from a stream keyed by a
hash of ``(s, r)``, so results do not depend on execution order.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit, ndtri

from .asymptotics import ModelSpec
from .estimators import (
    Dataset,
    EstimatorKind,
    SearchOptions,
    criterion,
    profile_fit,
)


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit stream key for replication ``index``."""
    ss = np.random.SeedSequence([int(master_seed) & (2**64 - 1), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))


def generate(model: ModelSpec, n: int, seed: int) -> Dataset:
    """Draw ``n`` observations from ``model``.

    Covariates are uniform on the unit square. Model 1 adds standard normal
    noise (inverse-CDF transform of uniforms) to ``(alpha0'X)**3``; model 2
    sums ten Bernoulli draws with success probability ``expit(alpha0'X)``.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    model = ModelSpec(model)
    rng = _generator(seed)
    X = rng.random((n, 2))
    u = X @ model.alpha0
    if model is ModelSpec.MODEL1:
        eps = ndtri(rng.random(n))
        Y = u**3 + eps
    else:
        draws = rng.random((n, 10))
        Y = (draws < expit(u)[:, None]).sum(axis=1).astype(float)
    return Dataset(X, Y)


@dataclass(frozen=True)
class ReplicationPlan:
    model: ModelSpec
    kind: EstimatorKind
    n: int
    reps: int
    master_seed: int = 1

    def __post_init__(self):
        if self.n < 10:
            raise ValueError("need n >= 10")
        if self.reps < 1:
            raise ValueError("need reps >= 1")


@dataclass
class SimulationSummary:
    mu_hat: np.ndarray
    scaled_cov: np.ndarray
    reps_used: int
    failures: int
    estimates: np.ndarray

    def row(self) -> dict:
        return {
            "mu1": self.mu_hat[0],
            "mu2": self.mu_hat[1],
            "s11": self.scaled_cov[0, 0],
            "s22": self.scaled_cov[1, 1],
            "s12": self.scaled_cov[0, 1],
            "reps_used": self.reps_used,
            "failures": self.failures,
        }


def _one_replication(args) -> Optional[np.ndarray]:
    plan, opts, r = args
    data = generate(plan.model, plan.n, derive_seed(plan.master_seed, r))
    try:
        return profile_fit(plan.kind, data, opts).alpha_hat
    except ValueError:
        return None


def run_replications(
    plan: ReplicationPlan, opts: SearchOptions = SearchOptions(), threads: int = 1
) -> list:
    """Estimates per replication, in replication order (None for failures)."""
    jobs = [(plan, opts, r) for r in range(plan.reps)]
    if threads <= 1:
        return [_one_replication(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_one_replication, jobs, chunksize=max(1, plan.reps // (4 * threads))))


def summarize(estimates: list, n: int) -> SimulationSummary:
    """Component means and ``n`` times the sample covariance of the estimates."""
    ok = [e for e in estimates if e is not None]
    failures = len(estimates) - len(ok)
    if not ok:
        raise ValueError("all replications failed")
    if len(ok) < 2:
        raise ValueError("need reps >= 2 for covariance")
    A = np.vstack(ok)
    mu = A.mean(axis=0)
    C = A - mu
    cov = n * (C.T @ C) / (len(ok) - 1)
    cov = 0.5 * (cov + cov.T)
    return SimulationSummary(mu, cov, len(ok), failures, A)


def run_monte_carlo(
    plan: ReplicationPlan, opts: SearchOptions = SearchOptions(), threads: int = 1
) -> SimulationSummary:
    """Run ``plan.reps`` independent fits and summarize them."""
    if plan.reps < 2:
        raise ValueError("need reps >= 2 for covariance")
    return summarize(run_replications(plan, opts, threads), plan.n)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("MONOINDEX_THREADS", "1")))
    except ValueError:
        return 1


def loss_curve(
    data: Dataset,
    kind: EstimatorKind,
    alpha1_grid,
    opts: SearchOptions = SearchOptions(),
) -> list:
    """Empirical criterion along ``alpha = (a1, sqrt(1 - a1**2))``."""
    grid = np.asarray(alpha1_grid, dtype=float)
    if data.d != 2:
        raise ValueError("loss curves require d = 2")
    if np.any(grid < 0) or np.any(grid > 1):
        raise ValueError("grid values must lie in [0, 1]")
    loss = criterion(kind, opts)
    return [(float(a), loss(np.array([a, np.sqrt(1.0 - a * a)]), data)) for a in grid]

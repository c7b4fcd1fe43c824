"""Bernoulli-Anderson trap ensembles: each site is lossy with probability p."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ._parallel import ordered_map
from .netmodel import ChainBuilder, NetworkSpec, build_chain
from .spectral import phi_of_gamma, theta_of_gamma


@dataclass(frozen=True)
class BernoulliEnsembleConfig:
    """Trap ensemble on ``base_chain``: trap sites get loss ``gamma`` and gain
    ``gamma * beta_ratio`` (beta_ratio = exp(-beta))."""

    p: float
    gamma: float = 1.2
    beta_ratio: float = 1 / 6
    n_realizations: int = 100
    seed: int = 42
    base_chain: ChainBuilder = field(default_factory=lambda: ChainBuilder(21, 1.0))

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.gamma < 0 or not 0 <= self.beta_ratio < 1:
            raise ValueError("need gamma >= 0 and 0 <= beta_ratio < 1 (bosonic stability)")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.base_chain.dissipative_nodes:
            raise ValueError("base_chain must carry no dissipation")


def trap_draws(seed: int, index: int, n_sites: int) -> np.ndarray:
    """Uniform draws for realization ``index``; entry n belongs to site n+1.

    Philox keyed through SeedSequence(seed, spawn_key=(index,)), so each
    realization is a pure function of (seed, index).
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss)).random(n_sites)


def sample_realization(config: BernoulliEnsembleConfig, index: int) -> NetworkSpec:
    if not 0 <= index < config.n_realizations:
        raise IndexError(f"realization {index} outside 0..{config.n_realizations - 1}")
    base = config.base_chain
    traps = trap_draws(config.seed, index, base.n_sites) < config.p
    nodes = {int(i) + 1: (config.gamma, config.gamma * config.beta_ratio) for i in np.flatnonzero(traps)}
    return build_chain(replace(base, dissipative_nodes=nodes))


@dataclass(frozen=True, eq=False)
class AveragedCurves:
    gamma_grid: np.ndarray
    phi_mean: np.ndarray
    theta_mean: np.ndarray
    phi_stderr: np.ndarray
    theta_stderr: np.ndarray
    realization_count: int
    trapless_count: int
    phi_samples: np.ndarray  # (R, G)
    theta_samples: np.ndarray  # (R, G)


def _stats(samples):
    r = samples.shape[0]
    mean = samples.mean(axis=0)
    if r < 2:
        return mean, np.zeros_like(mean)
    return mean, samples.std(axis=0, ddof=1) / np.sqrt(r)


def average_curves(config: BernoulliEnsembleConfig, gamma_grid, threads: int | None = None) -> AveragedCurves:
    """Mean and standard error of Φ(Γ), Θ(Γ) over the ensemble.

    Realizations without traps are kept; their rates are literally zero.
    """
    grid = np.asarray(gamma_grid, dtype=float)
    if grid.size == 0 or np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be nonempty, strictly increasing and nonnegative")

    def one(index):
        spec = sample_realization(config, index)
        rows = []
        for g in grid:
            s = spec.with_dephasing(float(g))
            rows.append((phi_of_gamma(s), theta_of_gamma(s)))
        return np.array(rows), not spec.dissipative_nodes

    results = ordered_map(one, range(config.n_realizations), threads)
    phi = np.array([r[0][:, 0] for r in results])
    theta = np.array([r[0][:, 1] for r in results])
    trapless = sum(r[1] for r in results)
    phi_mean, phi_se = _stats(phi)
    theta_mean, theta_se = _stats(theta)
    return AveragedCurves(grid, phi_mean, theta_mean, phi_se, theta_se, config.n_realizations, trapless, phi, theta)

"""Dephasing sweeps of Φ and Θ and the location of the optimal dephasing rate."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._parallel import ordered_map
from .netmodel import NetworkSpec
from .spectral import equilibrium, phi_of_gamma, theta_of_gamma

INV_PHI = (math.sqrt(5) - 1) / 2


def default_grid(n_points: int = 60, lo: float = 1e-2, hi: float = 1e3, include_zero: bool = True):
    grid = np.logspace(math.log10(lo), math.log10(hi), n_points)
    return np.concatenate([[0.0], grid]) if include_zero else grid


@dataclass(frozen=True, eq=False)
class SweepResult:
    gamma_grid: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    gamma_opt: float
    theta_max: float
    coarse_mask: np.ndarray  # False for points added by refinement
    bracket: tuple | None = None
    equilibria: list | None = None


def _as_family(spec_at) -> Callable[[float], NetworkSpec]:
    if isinstance(spec_at, NetworkSpec):
        return spec_at.with_dephasing
    return spec_at


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-3):
    """Shrink [lo, hi] around a local maximum of ``f`` until narrower than ``tol``.

    Returns the final bracket and the list of evaluated (x, f(x)) pairs.
    """
    evals = []

    def ev(x):
        y = f(x)
        evals.append((x, y))
        return y

    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = ev(c), ev(d)
    while b - a >= tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = ev(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = ev(d)
    return (a, b), evals


def run_sweep(
    spec_at,
    grid=None,
    refine: bool = False,
    tol: float = 1e-3,
    with_equilibria: bool = False,
    threads: int | None = None,
) -> SweepResult:
    """Evaluate Φ(Γ) and Θ(Γ) on ``grid``; optionally refine the Θ maximum.

    ``spec_at`` is either a NetworkSpec (its dephasing is replaced) or a
    callable Γ -> NetworkSpec. Plateau ties resolve to the smallest Γ.
    """
    family = _as_family(spec_at)
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty dephasing grid")
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing and nonnegative")

    def point(g):
        s = family(float(g))
        return phi_of_gamma(s), theta_of_gamma(s)

    values = ordered_map(point, grid, threads)
    phi = np.array([v[0] for v in values])
    theta = np.array([v[1] for v in values])
    coarse = np.ones(grid.size, dtype=bool)
    bracket = None

    if refine and grid.size > 1:
        i = int(np.argmax(theta))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        bracket, _ = golden_section_max(lambda g: theta_of_gamma(family(g)), lo, hi, tol)
        g_mid = 0.5 * (bracket[0] + bracket[1])
        if not np.any(grid == g_mid):
            p, t = point(g_mid)
            k = int(np.searchsorted(grid, g_mid))
            grid = np.insert(grid, k, g_mid)
            phi = np.insert(phi, k, p)
            theta = np.insert(theta, k, t)
            coarse = np.insert(coarse, k, False)

    i = int(np.argmax(theta))
    equilibria = None
    if with_equilibria:
        equilibria = ordered_map(lambda g: equilibrium(family(float(g))).c_eq, grid, threads)
    return SweepResult(grid, phi, theta, float(grid[i]), float(theta[i]), coarse, bracket, equilibria)

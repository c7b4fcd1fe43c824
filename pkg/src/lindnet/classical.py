"""Strong-dephasing limit: populations perform a classical random walk with
incoherent hopping 2|J_nm|^2/Γ and traps at the dissipative nodes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError
from .netmodel import NetworkSpec, Statistics, require_valid


@dataclass(frozen=True, eq=False)
class ClassicalModel:
    rate_matrix: np.ndarray
    source: np.ndarray
    gap: float
    p_eq: np.ndarray
    spectrum: np.ndarray


def build_classical(spec: NetworkSpec) -> ClassicalModel:
    spec = require_valid(spec)
    if spec.dephasing <= 0:
        raise InvalidSpecError("dephasing required: the classical limit needs Γ > 0")
    J = np.asarray(spec.hopping)
    inc = 2.0 * np.abs(J) ** 2 / spec.dephasing
    np.fill_diagonal(inc, 0.0)
    if spec.statistics is Statistics.FERMIONIC:
        trap = spec.loss + spec.gain
    else:
        trap = spec.loss - spec.gain
    rates = inc - np.diag(inc.sum(axis=1) + trap)
    spectrum = np.linalg.eigvalsh(rates)
    gap = float(np.min(np.abs(spectrum)))
    source = spec.gain.astype(float).copy()
    # min-norm solution: trap-free components (no source there) get zero population
    p_eq = np.linalg.lstsq(rates, -source, rcond=None)[0]
    return ClassicalModel(rates, source, gap, p_eq, spectrum)


@dataclass(frozen=True)
class IslandDecomposition:
    """Maximal runs of dissipation-free sites as 1-based inclusive (start, end)."""

    islands: tuple
    l_max: int


def _check_chain(spec: NetworkSpec) -> np.ndarray:
    J = np.asarray(spec.hopping)
    n = spec.n_sites
    far = np.abs(np.triu(J, 2))
    if np.any(far > 0):
        raise InvalidSpecError("islands are defined for chains only (tridiagonal hopping)")
    bonds = np.abs(np.diagonal(J, 1))
    if n > 1 and np.any(bonds == 0):
        raise InvalidSpecError("chain has a broken bond")
    return bonds


def islands(spec: NetworkSpec) -> IslandDecomposition:
    _check_chain(spec)
    free = ~spec.dissipative_mask
    runs = []
    start = None
    for i, f in enumerate(free, start=1):
        if f and start is None:
            start = i
        elif not f and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, spec.n_sites))
    l_max = max((b - a + 1 for a, b in runs), default=0)
    return IslandDecomposition(tuple(runs), l_max)


def lifshitz_rate(hop_rate: float, l_max: int, dephasing: float) -> float:
    """2 pi^2 J^2 / (Γ (l_max + 1)^2); ``l_max`` may be non-integer."""
    return 2.0 * math.pi**2 * hop_rate**2 / (dephasing * (l_max + 1) ** 2)


def lifshitz_asymptote(spec: NetworkSpec, gamma_deph: float | None = None) -> float:
    """Decay rate of the longest-lived island mode for a uniform chain."""
    gamma_deph = spec.dephasing if gamma_deph is None else gamma_deph
    if not gamma_deph > 0:
        raise InvalidSpecError("asymptote needs a positive dephasing rate")
    bonds = _check_chain(spec)
    if bonds.size == 0:
        raise InvalidSpecError("asymptote needs at least two sites")
    if np.ptp(bonds) > 1e-12 * bonds.max():
        raise InvalidSpecError("asymptote requires uniform |J| along the chain")
    l_max = islands(spec).l_max
    if l_max == 0:
        raise InvalidSpecError("no dissipation-free island: asymptote inapplicable")
    return lifshitz_rate(float(bonds[0]), l_max, gamma_deph)


def expected_longest_island(p: float, n_sites: int, sigma: float = 1.0) -> float:
    """Extreme-value estimate -ln(sigma p N)/ln(1-p) of the longest trap-free run."""
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if n_sites < 1 or sigma <= 0:
        raise ValueError("n_sites and sigma must be positive")
    arg = sigma * p * n_sites
    if arg <= 1:
        raise ValueError(f"sigma*p*N must exceed 1, got {arg}")
    return -math.log(arg) / math.log1p(-p)

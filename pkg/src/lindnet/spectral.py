"""Relaxation rates, equilibrium correlations and dark-mode diagnostics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import EigenSolverError, SingularSystemError
from .moment_generators import (
    build_first_moment,
    build_second_moment,
    hermitian_real_form,
)
from .netmodel import NetworkSpec, require_valid, standing_wave_eigenstates

ZERO_GAP = 1e-12


@dataclass(frozen=True, eq=False)
class GapResult:
    gap: float
    achieving_eigenvalue: complex
    spectrum: np.ndarray

    @property
    def non_relaxing(self) -> bool:
        """True when a (numerically) zero-rate mode is present."""
        return self.gap < ZERO_GAP


@dataclass(frozen=True, eq=False)
class EquilibriumState:
    c_eq: np.ndarray
    a_eq: np.ndarray


def sort_spectrum(eigenvalues) -> np.ndarray:
    """Order by ascending |Re|, then ascending Im, then ascending modulus."""
    ev = np.asarray(eigenvalues, dtype=complex)
    order = np.lexsort((np.abs(ev), ev.imag, np.abs(ev.real)))
    return ev[order]


def spectral_gap(matrix) -> GapResult:
    """Smallest |Re| over the full spectrum of a (nonsymmetric) square matrix.

    A zero eigenvalue is kept and gives gap 0.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    try:
        ev = sla.eigvals(m, check_finite=False, overwrite_a=False)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(
            f"nonsymmetric eigensolver (QR iteration) did not converge for a "
            f"{m.shape[0]}x{m.shape[0]} matrix: {exc}"
        ) from exc
    spectrum = sort_spectrum(ev)
    return GapResult(float(abs(spectrum[0].real)), complex(spectrum[0]), spectrum)


def first_moment_gap(spec: NetworkSpec) -> GapResult:
    return spectral_gap(build_first_moment(spec).matrix_a)


def second_moment_gap(spec: NetworkSpec, real_form: bool = True) -> GapResult:
    """Gap of B. ``real_form`` diagonalizes the similar real matrix (about
    twice as fast); both routes give the same spectrum."""
    gen = build_second_moment(spec)
    m = hermitian_real_form(gen) if real_form else gen.matrix_b
    return spectral_gap(m)


def phi_of_gamma(spec: NetworkSpec) -> float:
    """Slowest relaxation rate of the mean values at the spec's dephasing."""
    return first_moment_gap(spec).gap


def theta_of_gamma(spec: NetworkSpec, real_form: bool = True) -> float:
    """Slowest relaxation rate of the correlation matrix."""
    return second_moment_gap(spec, real_form=real_form).gap


PIVOT_RATIO_TOL = 1e-13


def _full_pivot_solve(m: np.ndarray, rhs: np.ndarray):
    """Complete-pivoting LU solve; also returns min/max pivot magnitude ratio."""
    lu, ipiv, jpiv, info = lapack.zgetc2(m)
    piv = np.abs(np.diag(lu))
    ratio = piv.min() / piv.max() if piv.max() > 0 else 0.0
    x, scale = lapack.zgesc2(lu, rhs.astype(complex), ipiv, jpiv)
    return x / scale, info, ratio


def equilibrium(spec: NetworkSpec) -> EquilibriumState:
    """Stationary correlations from ``B x = -G`` (complete-pivoting LU)."""
    spec = require_valid(spec)
    gen = build_second_moment(spec)
    b = gen.matrix_b
    n = spec.n_sites
    x, info, ratio = _full_pivot_solve(b, -gen.source)
    resid = np.max(np.abs(b @ x + gen.source), initial=0.0)
    scale = max(1.0, np.max(np.abs(gen.source), initial=0.0))
    if info > 0 or ratio < PIVOT_RATIO_TOL or not np.all(np.isfinite(x)) or resid > 1e-8 * scale:
        near = spectral_gap(b).achieving_eigenvalue
        raise SingularSystemError(
            f"stationary equations are singular (pivot ratio {ratio:.1e}); "
            f"eigenvalue closest to the imaginary axis: {near:.3e}",
            eigenvalue=near,
        )
    c = x.reshape(n, n)
    asym = np.max(np.abs(c - c.conj().T))
    if asym > 1e-10 * max(1.0, np.max(np.abs(c))):
        raise SingularSystemError(f"equilibrium correlations not Hermitian (asymmetry {asym:.2e})")
    c = 0.5 * (c + c.conj().T)
    return EquilibriumState(c_eq=c, a_eq=np.zeros(n, dtype=complex))


@dataclass(frozen=True, eq=False)
class DarkMode:
    index: int
    energy: float
    vector: np.ndarray
    leakage: float
    kind: str  # "dark", "quasi-dark" or "bright"


def dark_state_analysis(spec: NetworkSpec, tol: float = 1e-8, quasi_tol: float = 1e-2) -> list:
    """Weight of every hopping eigenmode on the dissipative nodes.

    Returns all modes sorted by ascending leakage; ``index`` is the 1-based
    position in ascending-energy order.
    """
    if not tol > 0 or not quasi_tol >= tol:
        raise ValueError("need 0 < tol <= quasi_tol")
    spec = require_valid(spec)
    mask = spec.dissipative_mask
    modes = []
    for k, (energy, xi) in enumerate(standing_wave_eigenstates(spec), start=1):
        xi = xi / np.linalg.norm(xi)
        leak = float(np.sum(np.abs(xi[mask]) ** 2))
        kind = "dark" if leak < tol else "quasi-dark" if leak < quasi_tol else "bright"
        modes.append(DarkMode(k, energy, xi, leak, kind))
    modes.sort(key=lambda d: (d.leakage, d.index))
    return modes

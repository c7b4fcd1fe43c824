"""Linear generators of the first- and second-moment dynamics.

Mean values ``A_n = <a_n>`` obey ``dA/dt = A_mat @ A`` and the correlation
matrix ``C_nm = <a_n^dag a_m>`` obeys ``dC/dt = B(C) + G``. Correlation
matrices are flattened row-major: ``flatten(n, m) = n*N + m`` (0-based).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeneratorSizeError
from .netmodel import NetworkSpec, Statistics, require_valid

DEFAULT_MAX_SITES = 64


def flat_index(n: int, m: int, n_sites: int) -> int:
    """Row-major position of entry (n, m), both 1-based."""
    return (n - 1) * n_sites + (m - 1)


@dataclass(frozen=True, eq=False)
class FirstMomentGenerator:
    matrix_a: np.ndarray


@dataclass(frozen=True, eq=False)
class SecondMomentGenerator:
    """Dense generator ``matrix_b`` (None when built matrix-free) plus the
    pieces needed for the matrix-free action."""

    matrix_b: np.ndarray | None
    source: np.ndarray
    statistics: Statistics
    hopping: np.ndarray
    damping: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.hopping.shape[0]


def build_first_moment(spec: NetworkSpec) -> FirstMomentGenerator:
    spec = require_valid(spec)
    rates = 0.5 * (spec.loss + spec.dephasing - spec.gain)
    a = -1j * np.asarray(spec.hopping) - np.diag(rates)
    return FirstMomentGenerator(a)


def _damping_matrix(spec: NetworkSpec) -> np.ndarray:
    # Diagonal of B reshaped to N x N: dephasing on coherences plus local damping.
    gl, gg = spec.loss, spec.gain
    if spec.statistics is Statistics.FERMIONIC:
        local = 0.5 * (gl[:, None] + gl[None, :] + gg[:, None] + gg[None, :])
    else:
        local = 0.5 * (gl[:, None] + gl[None, :] - gg[:, None] - gg[None, :])
    offdiag = 1.0 - np.eye(spec.n_sites)
    return -spec.dephasing * offdiag - local


def build_second_moment(
    spec: NetworkSpec, dense: bool = True, max_sites: int = DEFAULT_MAX_SITES
) -> SecondMomentGenerator:
    """Assemble B and the source vector G (G = g_n on the flattened diagonal).

    Entry ((n,m),(n,l)) of B carries -i J_ml and entry ((n,m),(l,m)) carries
    +i J_ln; the diagonal adds the dephasing and local damping terms.
    """
    spec = require_valid(spec)
    n = spec.n_sites
    J = np.asarray(spec.hopping)
    damping = _damping_matrix(spec)
    source = np.diag(spec.gain).astype(float).ravel()
    b = None
    if dense:
        if n > max_sites:
            raise GeneratorSizeError(
                f"dense second-moment generator refused for N={n} > {max_sites} "
                f"({n * n}x{n * n} entries); use dense=False"
            )
        eye = np.eye(n)
        b = 1j * np.kron(J.T, eye) - 1j * np.kron(eye, J)
        b[np.diag_indices_from(b)] += damping.ravel()
    for a in (J, damping, source):
        a.setflags(write=False)
    return SecondMomentGenerator(b, source, spec.statistics, J, damping)


def _coherent_and_damped(gen: SecondMomentGenerator, c: np.ndarray) -> np.ndarray:
    jt = gen.hopping.T
    return 1j * (jt @ c - c @ jt) + gen.damping * c


def apply_second_moment(gen: SecondMomentGenerator, c, dense: bool = False) -> np.ndarray:
    """Return ``dC/dt = unflatten(B @ flatten(c) + G)``.

    The default is the matrix-free evaluation; ``dense=True`` multiplies by the
    assembled matrix instead.
    """
    c = np.asarray(c)
    n = gen.n_sites
    if c.shape != (n, n):
        raise ValueError(f"correlation matrix must have shape {(n, n)}, got {c.shape}")
    if dense:
        if gen.matrix_b is None:
            raise ValueError("generator was built without a dense matrix")
        return (gen.matrix_b @ c.ravel() + gen.source).reshape(n, n)
    out = _coherent_and_damped(gen, c)
    out[np.diag_indices(n)] += np.diag(gen.source.reshape(n, n))
    return out


def apply_first_moment(gen: FirstMomentGenerator, a) -> np.ndarray:
    return gen.matrix_a @ np.asarray(a)


def _hermitian_basis(n: int):
    """Sparse maps between C^{N^2} and real coordinates of Hermitian matrices.

    Coordinates: x[n,n] = C_nn, x[n,m] = Re C_nm and x[m,n] = Im C_nm for n < m.
    Returns (P, T) with P mapping coordinates to the flattened matrix and T
    the complex row map so that x = Re(T @ flatten(C)) for Hermitian C.
    """
    from scipy import sparse

    rows_p, cols_p, vals_p = [], [], []
    rows_t, cols_t, vals_t = [], [], []
    for i in range(n):
        for j in range(n):
            k = i * n + j
            if i == j:
                rows_p.append(k); cols_p.append(k); vals_p.append(1.0)
                rows_t.append(k); cols_t.append(k); vals_t.append(1.0)
            elif i < j:
                kt = j * n + i
                # basis E_ij + E_ji
                rows_p += [k, kt]; cols_p += [k, k]; vals_p += [1.0, 1.0]
                rows_t.append(k); cols_t.append(k); vals_t.append(1.0)
            else:
                ku = j * n + i  # upper entry (j, i)
                # basis i E_ji - i E_ij, so C_ji = i
                rows_p += [ku, k]; cols_p += [k, k]; vals_p += [1j, -1j]
                rows_t.append(k); cols_t.append(ku); vals_t.append(-1j)
    size = n * n
    p = sparse.csr_matrix((vals_p, (rows_p, cols_p)), shape=(size, size), dtype=complex)
    t = sparse.csr_matrix((vals_t, (rows_t, cols_t)), shape=(size, size), dtype=complex)
    return p, t


def hermitian_real_form(gen: SecondMomentGenerator) -> np.ndarray:
    """Real N^2 x N^2 matrix similar to B, acting on Hermitian coordinates.

    B maps Hermitian matrices to Hermitian matrices, so written in a basis of
    Hermitian matrices it is real; its eigenvalues coincide with those of B.
    """
    if gen.matrix_b is None:
        raise ValueError("generator was built without a dense matrix")
    p, t = _hermitian_basis(gen.n_sites)
    bp = (p.T @ gen.matrix_b.T).T
    return np.ascontiguousarray((t @ bp).real)

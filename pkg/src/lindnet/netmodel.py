"""Network description: hopping matrix, local loss/gain, dephasing, statistics.

Sites are numbered 1..N wherever a user names them (chain builders, config
files, island lists); arrays are indexed 0..N-1.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .errors import InvalidSpecError

HERMITIAN_TOL = 1e-12


class Statistics(str, enum.Enum):
    BOSONIC = "bosonic"
    FERMIONIC = "fermionic"


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """Immutable description of a dissipative network.

    All rates are in units of ``reference_rate`` (by default the chain hop
    rate, so ``dephasing=0.25`` means Γ = 0.25 J).
    """

    hopping: np.ndarray
    loss: np.ndarray
    gain: np.ndarray
    dephasing: float = 0.0
    statistics: Statistics = Statistics.BOSONIC
    reference_rate: float = 1.0

    def __post_init__(self):
        hopping = np.atleast_2d(np.asarray(self.hopping, dtype=complex))
        object.__setattr__(self, "hopping", _frozen(hopping))
        object.__setattr__(self, "loss", _frozen(np.atleast_1d(np.asarray(self.loss, dtype=float))))
        object.__setattr__(self, "gain", _frozen(np.atleast_1d(np.asarray(self.gain, dtype=float))))
        object.__setattr__(self, "dephasing", float(self.dephasing))
        object.__setattr__(self, "statistics", Statistics(self.statistics))

    @property
    def n_sites(self) -> int:
        return self.hopping.shape[0]

    @property
    def dissipative_mask(self) -> np.ndarray:
        return (self.loss > 0) | (self.gain > 0)

    @property
    def dissipative_nodes(self) -> tuple:
        """1-based indices of nodes with nonzero loss or gain."""
        return tuple(int(i) + 1 for i in np.flatnonzero(self.dissipative_mask))

    def with_dephasing(self, dephasing: float) -> "NetworkSpec":
        return replace(self, dephasing=dephasing)


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "valid" if self.ok else "; ".join(self.violations)


def validate(spec: NetworkSpec) -> ValidationReport:
    """List every violated invariant of ``spec``; an empty report means valid."""
    out = []
    J = spec.hopping
    n = J.shape[0]
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        out.append(f"hopping must be square, got shape {J.shape}")
        return ValidationReport(out)
    if n < 1:
        out.append("n_sites must be positive")
    for name, v in (("loss", spec.loss), ("gain", spec.gain)):
        if v.shape != (n,):
            out.append(f"{name} must have length {n}, got shape {v.shape}")
    if not np.all(np.isfinite(J)):
        out.append("hopping has non-finite entries")
    elif np.max(np.abs(J - J.conj().T), initial=0.0) > HERMITIAN_TOL:
        out.append("hopping is not Hermitian")
    if out:
        return ValidationReport(out)

    for name, v in (("loss", spec.loss), ("gain", spec.gain)):
        if not np.all(np.isfinite(v)):
            out.append(f"{name} has non-finite entries")
        elif np.any(v < 0):
            bad = [int(i) + 1 for i in np.flatnonzero(v < 0)]
            out.append(f"{name} is negative at nodes {bad}")
    if not np.isfinite(spec.dephasing) or spec.dephasing < 0:
        out.append(f"dephasing must be finite and >= 0, got {spec.dephasing}")
    if not (np.isfinite(spec.reference_rate) and spec.reference_rate > 0):
        out.append("reference_rate must be positive")

    if spec.statistics is Statistics.BOSONIC and not out:
        pumped = spec.gain > 0
        unstable = pumped & (spec.gain >= spec.loss)
        if np.any(unstable):
            bad = [int(i) + 1 for i in np.flatnonzero(unstable)]
            out.append(f"gain exceeds loss at nodes {bad} (bosonic stability requires g_n < gamma_n)")
    return ValidationReport(out)


def require_valid(spec: NetworkSpec) -> NetworkSpec:
    """Raise on an invalid spec; otherwise return it with symmetrized hopping."""
    report = validate(spec)
    if not report.ok:
        raise InvalidSpecError(str(report))
    J = spec.hopping
    sym = 0.5 * (J + J.conj().T)
    if np.array_equal(sym, J):
        return spec
    return replace(spec, hopping=sym)


@dataclass(frozen=True)
class ChainBuilder:
    """Open uniform chain with optional per-node (loss, gain) pairs.

    ``dissipative_nodes`` maps a 1-based site index to ``(gamma, gain)``.
    """

    n_sites: int
    hop_rate: float = 1.0
    dissipative_nodes: Mapping = field(default_factory=dict)
    dephasing: float = 0.0
    statistics: Statistics = Statistics.BOSONIC


def build_chain(builder: ChainBuilder) -> NetworkSpec:
    n = int(builder.n_sites)
    if n < 1:
        raise InvalidSpecError(f"n_sites must be positive, got {n}")
    J = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    J[idx, idx + 1] = builder.hop_rate
    J[idx + 1, idx] = builder.hop_rate
    loss = np.zeros(n)
    gain = np.zeros(n)
    for node, (gamma, g) in builder.dissipative_nodes.items():
        if not 1 <= int(node) <= n:
            raise InvalidSpecError(f"node index {node} outside 1..{n}")
        loss[int(node) - 1] = gamma
        gain[int(node) - 1] = g
    return NetworkSpec(
        hopping=J,
        loss=loss,
        gain=gain,
        dephasing=builder.dephasing,
        statistics=builder.statistics,
        reference_rate=builder.hop_rate if builder.hop_rate > 0 else 1.0,
    )


def standing_wave_eigenstates(spec: NetworkSpec) -> list:
    """Eigenpairs ``(energy, xi)`` of the hopping matrix, ascending in energy.

    Vectors are normalized; for real hopping they are real with the sign
    fixed so the first nonzero component is positive.
    """
    J = np.asarray(spec.hopping)
    J = 0.5 * (J + J.conj().T)
    real = np.allclose(J.imag, 0.0, atol=HERMITIAN_TOL, rtol=0)
    try:
        energies, vecs = np.linalg.eigh(J.real if real else J)
    except np.linalg.LinAlgError as exc:
        from .errors import EigenSolverError

        raise EigenSolverError(f"hopping eigensolver failed: {exc}") from exc
    out = []
    for k in range(len(energies)):
        v = vecs[:, k]
        lead = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
        v = v * (abs(lead) / lead)
        out.append((float(energies[k]), v))
    return out


def standing_wave(n_sites: int, mode: int) -> np.ndarray:
    """Analytic normalized mode ``sqrt(2/(N+1)) sin(pi l n/(N+1))``, 1-based l."""
    n = np.arange(1, n_sites + 1)
    return np.sqrt(2.0 / (n_sites + 1)) * np.sin(np.pi * mode * n / (n_sites + 1))


# The deterministic chains of the relaxation study (N=21, traps at 2, 6, 8, 20,
# weak extra loss at site 1).
_FIG2_TRAPS = (2, 6, 8, 20)


def fig2_chain(dephasing: float = 0.0, extra_loss: bool = True) -> NetworkSpec:
    nodes = {n: (1.2, 0.2) for n in _FIG2_TRAPS}
    if extra_loss:
        nodes[1] = (0.06, 0.01)
    return build_chain(ChainBuilder(21, 1.0, nodes, dephasing=dephasing))


def fig3_chain(dephasing: float = 0.0) -> NetworkSpec:
    nodes = {n: (1.2, 0.2) for n in _FIG2_TRAPS}
    nodes[8] = (1.2, 0.4)
    nodes[1] = (0.06, 0.01)
    return build_chain(ChainBuilder(21, 1.0, nodes, dephasing=dephasing))

"""Relaxation of dissipative bosonic and fermionic networks under dephasing."""

__version__ = "0.1.0"

from .netmodel import (  # noqa: E402
    ChainBuilder,
    NetworkSpec,
    Statistics,
    build_chain,
    fig2_chain,
    fig3_chain,
    standing_wave_eigenstates,
    validate,
)
from .moment_generators import apply_second_moment, build_first_moment, build_second_moment  # noqa: E402
from .spectral import dark_state_analysis, equilibrium, phi_of_gamma, spectral_gap, theta_of_gamma  # noqa: E402
from .classical import build_classical, expected_longest_island, islands, lifshitz_asymptote  # noqa: E402
from .sweep import run_sweep  # noqa: E402

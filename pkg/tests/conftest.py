import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lindnet.netmodel import NetworkSpec, Statistics, fig2_chain, fig3_chain

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=100
)
settings.register_profile("ci", deadline=None, max_examples=1000)
settings.load_profile("default")


@pytest.fixture
def fig2():
    return fig2_chain()


@pytest.fixture
def fig3():
    return fig3_chain()


def random_hermitian(rng, n, scale=1.0):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (m + m.conj().T)


def random_spec(rng, n=None, statistics=Statistics.BOSONIC, dephasing=None, connected=True):
    """Random valid spec with at least one dissipative node."""
    n = int(rng.integers(1, 7)) if n is None else n
    J = random_hermitian(rng, n)
    if connected and n > 1:
        # keep a chain backbone so the hopping graph is connected
        idx = np.arange(n - 1)
        J[idx, idx + 1] += 0.5
        J[idx + 1, idx] += 0.5
    loss = np.where(rng.random(n) < 0.5, rng.uniform(0.1, 2.0, n), 0.0)
    loss[rng.integers(n)] = rng.uniform(0.1, 2.0)
    if statistics is Statistics.BOSONIC:
        gain = np.where(loss > 0, loss * rng.uniform(0.0, 0.9, n), 0.0)
    else:
        gain = np.where(rng.random(n) < 0.5, rng.uniform(0.0, 2.0, n), 0.0)
    if dephasing is None:
        dephasing = float(rng.uniform(0, 3))
    return NetworkSpec(J, loss, gain, dephasing, statistics)


@st.composite
def specs(draw, max_sites=6, statistics=Statistics.BOSONIC, dephasing=None):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, max_sites))
    return random_spec(np.random.default_rng(seed), n, statistics, dephasing)


def reference_second_moment(spec):
    """B assembled entry by entry from the explicit index sum, for comparison
    with the vectorized kron construction."""
    n = spec.n_sites
    J, gl, gg = spec.hopping, spec.loss, spec.gain
    sign = 1.0 if spec.statistics is Statistics.FERMIONIC else -1.0
    b = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            row = i * n + j
            for l in range(n):
                b[row, i * n + l] += -1j * J[j, l]
                b[row, l * n + j] += 1j * J[l, i]
            b[row, row] += -spec.dephasing * (i != j)
            b[row, row] += -0.5 * (gl[i] + gl[j] + sign * (gg[i] + gg[j]))
    g = np.zeros(n * n)
    for i in range(n):
        g[i * n + i] = gg[i]
    return b, g

import math

import numpy as np
import pytest
from hypothesis import given
from scipy.optimize import linear_sum_assignment

from lindnet.errors import SingularSystemError
from lindnet.moment_generators import build_first_moment, build_second_moment
from lindnet.netmodel import ChainBuilder, NetworkSpec, Statistics, build_chain, fig2_chain
from lindnet.spectral import (
    dark_state_analysis,
    equilibrium,
    first_moment_gap,
    phi_of_gamma,
    second_moment_gap,
    sort_spectrum,
    spectral_gap,
    theta_of_gamma,
)

from conftest import random_hermitian, random_spec, specs


def uniform_ratio_chain(ratio, n=21, traps=(1, 2, 6, 8, 20), gamma=1.2):
    return build_chain(ChainBuilder(n, 1.0, {k: (gamma, gamma * ratio) for k in traps}))


class TestSpectralGap:
    def test_scalar(self):
        res = spectral_gap([[-0.5]])
        assert res.gap == 0.5
        assert res.achieving_eigenvalue == -0.5

    def test_two_site_first_moment(self):
        spec = build_chain(ChainBuilder(2, 1.0, {1: (1.0, 0.0)}))
        res = first_moment_gap(spec)
        roots = np.roots([1.0, 0.5, 1.0])  # characteristic polynomial of [[-0.5,-i],[-i,0]]
        assert res.gap == pytest.approx(0.25, abs=1e-12)
        np.testing.assert_allclose(sorted(res.spectrum, key=lambda z: z.imag), sorted(roots, key=lambda z: z.imag), atol=1e-12)
        assert abs(res.spectrum[0].imag) == pytest.approx(math.sqrt(1 - 0.0625), abs=1e-12)
        assert abs(abs(res.spectrum[0].imag) - 0.9682) < 1e-4

    def test_zero_eigenvalue_is_reported(self):
        res = spectral_gap(np.diag([0.0, -1.0]))
        assert res.gap == 0.0
        assert res.non_relaxing

    def test_tie_break(self):
        ev = sort_spectrum([-1 + 2j, -1 - 2j, -1.0, 0.5 - 3j])
        np.testing.assert_array_equal(ev, [0.5 - 3j, -1 - 2j, -1.0, -1 + 2j])
        ev = sort_spectrum([-1 + 1j, 1 + 1j])
        # equal |Re| and Im: smaller modulus is the same here, order must be stable
        assert list(ev) == list(sort_spectrum(ev))

    @pytest.mark.parametrize("seed", range(5))
    def test_hermitian_negative_definite_matches_symmetric_solver(self, seed):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, 8)
        m = h - (np.max(np.linalg.eigvalsh(h)) + 0.3) * np.eye(8)
        expected = np.min(np.abs(np.linalg.eigvalsh(m)))
        assert abs(spectral_gap(m).gap - expected) < 1e-12

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            spectral_gap(np.zeros((2, 3)))

    def test_fig2_first_moment_gap_is_half_theta(self, fig2):
        assert first_moment_gap(fig2).gap == pytest.approx(theta_of_gamma(fig2) / 2, rel=1e-8)


class TestRates:
    def test_phi_scalar(self):
        assert phi_of_gamma(NetworkSpec([[0]], [1.2], [0.2])) == pytest.approx(0.5)
        assert phi_of_gamma(NetworkSpec([[0]], [1.2], [0.2], dephasing=2.0)) == pytest.approx(1.5)

    def test_phi_monotone_fig2(self, fig2):
        values = [phi_of_gamma(fig2.with_dephasing(g)) for g in np.arange(0, 10.01, 0.5)]
        assert np.all(np.diff(values) >= 0)

    @pytest.mark.parametrize("deph", [0.0, 1.0, 25.0])
    def test_theta_scalar(self, deph):
        assert theta_of_gamma(NetworkSpec([[0]], [1.2], [0.2], dephasing=deph)) == pytest.approx(1.0)

    def test_theta_twice_phi_at_zero(self, fig2):
        assert theta_of_gamma(fig2) == pytest.approx(2 * phi_of_gamma(fig2), rel=1e-8)

    def test_lifshitz_scaling_at_strong_dephasing(self, fig2):
        theta = theta_of_gamma(fig2.with_dephasing(100.0))
        ratio = theta * 100.0 * 12**2 / (2 * math.pi**2)
        assert 0.9 <= ratio <= 1.1

    @pytest.mark.parametrize("stats", list(Statistics))
    def test_real_and_complex_routes_agree(self, stats):
        spec = random_spec(np.random.default_rng(5), 5, statistics=stats)
        a = second_moment_gap(spec, real_form=True)
        b = second_moment_gap(spec, real_form=False)
        assert a.gap == pytest.approx(b.gap, rel=1e-10)

    @given(specs())
    def test_dephasing_shifts_first_moment_spectrum(self, spec):
        delta = 0.37
        a0 = np.linalg.eigvals(build_first_moment(spec).matrix_a)
        a1 = np.linalg.eigvals(build_first_moment(spec.with_dephasing(spec.dephasing + delta)).matrix_a)
        cost = np.abs(np.subtract.outer(a1, a0 - delta / 2))
        r, c = linear_sum_assignment(cost)
        assert cost[r, c].max() < 1e-10
        assert phi_of_gamma(spec.with_dephasing(spec.dephasing + delta)) >= phi_of_gamma(spec)


class TestEquilibrium:
    @pytest.mark.parametrize("deph", [0.0, 0.25, 5.0, 100.0])
    def test_fig2_is_thermal_diagonal(self, fig2, deph):
        c = equilibrium(fig2.with_dephasing(deph)).c_eq
        assert np.max(np.abs(c - 0.2 * np.eye(21))) < 1e-9

    def test_near_instability(self):
        spec = uniform_ratio_chain(math.exp(-0.01))
        c = equilibrium(spec).c_eq
        expected = 1 / math.expm1(0.01)
        assert expected == pytest.approx(99.5008, abs=1e-4)
        np.testing.assert_allclose(np.diag(c).real, expected, rtol=1e-8)
        assert np.max(np.abs(c - np.diag(np.diag(c)))) < 1e-8 * expected

    def test_fig3_depends_on_dephasing(self, fig3):
        c0 = equilibrium(fig3).c_eq
        c5 = equilibrium(fig3.with_dephasing(5.0)).c_eq
        off = c0 - np.diag(np.diag(c0))
        assert np.max(np.abs(off)) > 1e-3
        assert np.max(np.abs(c0 - c5)) > 1e-3

    def test_exact_dark_state_is_singular(self):
        spec = fig2_chain(extra_loss=False)
        with pytest.raises(SingularSystemError) as info:
            equilibrium(spec)
        assert abs(info.value.eigenvalue) < 1e-8

    def test_mean_values_vanish(self, fig2):
        np.testing.assert_array_equal(equilibrium(fig2).a_eq, np.zeros(21))

    def test_fermionic_scalar(self):
        c = equilibrium(NetworkSpec([[0]], [0.7], [0.4], statistics=Statistics.FERMIONIC)).c_eq
        assert c[0, 0].real == pytest.approx(0.4 / 1.1, abs=1e-12)

    @given(specs())
    def test_residual_hermitian_psd(self, spec):
        gen = build_second_moment(spec)
        c = equilibrium(spec).c_eq
        resid = np.max(np.abs(gen.matrix_b @ c.ravel() + gen.source))
        assert resid < 1e-10 * max(1.0, np.max(gen.source))
        np.testing.assert_array_equal(c, c.conj().T)
        assert np.linalg.eigvalsh(c).min() > -1e-10

    @pytest.mark.parametrize("seed", range(4))
    def test_uniform_ratio_is_dephasing_independent(self, seed):
        rng = np.random.default_rng(seed)
        n = 6
        ratio = rng.uniform(0.05, 0.9)
        loss = rng.uniform(0.1, 2.0, n) * (rng.random(n) < 0.6)
        loss[0] = 1.0
        spec = NetworkSpec(random_hermitian(rng, n), loss, ratio * loss)
        c0 = equilibrium(spec).c_eq
        c5 = equilibrium(spec.with_dephasing(5.0)).c_eq
        assert np.max(np.abs(c0 - c5)) < 1e-9
        np.testing.assert_allclose(c0, ratio / (1 - ratio) * np.eye(n), atol=1e-9)


class TestDarkStates:
    def test_exact_dark_state(self):
        modes = dark_state_analysis(fig2_chain(extra_loss=False))
        best = modes[0]
        assert best.index == 11  # ascending energy; zero-energy mode of 21
        assert best.leakage < 1e-12
        assert best.kind == "dark"

    def test_quasi_dark_leakage(self, fig2):
        mode = next(d for d in dark_state_analysis(fig2) if d.index == 11)
        expected = (2 / 22) * math.sin(math.pi * 11 / 22) ** 2
        assert mode.leakage == pytest.approx(expected, abs=1e-12)
        assert mode.leakage == pytest.approx(1 / 11, abs=1e-12)
        assert dark_state_analysis(fig2)[0].index == 11

    def test_two_site_no_dark_states(self):
        modes = dark_state_analysis(build_chain(ChainBuilder(2, 1.0, {1: (1.0, 0.0)})))
        assert [m.leakage for m in modes] == pytest.approx([0.5, 0.5])
        assert all(m.kind == "bright" for m in modes)

    def test_thresholds(self, fig2):
        kinds = {m.index: m.kind for m in dark_state_analysis(fig2, tol=1e-8, quasi_tol=0.1)}
        assert kinds[11] == "quasi-dark"
        with pytest.raises(ValueError):
            dark_state_analysis(fig2, tol=0.1, quasi_tol=0.01)

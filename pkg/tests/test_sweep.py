import math

import numpy as np
import pytest

from lindnet.netmodel import NetworkSpec, fig2_chain
from lindnet.spectral import equilibrium, theta_of_gamma
from lindnet.sweep import default_grid, golden_section_max, run_sweep


class TestGrid:
    def test_default_grid(self):
        g = default_grid()
        assert g.size == 61
        assert g[0] == 0 and g[1] == pytest.approx(1e-2) and g[-1] == pytest.approx(1e3)
        assert np.all(np.diff(g) > 0)
        assert default_grid(include_zero=False).size == 60


class TestGoldenSection:
    def test_parabola(self):
        (a, b), evals = golden_section_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, tol=1e-6)
        assert b - a < 1e-6
        assert 0.5 * (a + b) == pytest.approx(0.3, abs=1e-6)
        assert all(0.0 <= x <= 1.0 for x, _ in evals)

    def test_plateau_moves_left(self):
        (a, b), _ = golden_section_max(lambda x: 1.0, 0.0, 1.0, tol=1e-4)
        assert b < 1e-3


class TestSweep:
    @pytest.fixture(scope="class")
    @staticmethod
    def fig2_sweep():
        return run_sweep(fig2_chain(), default_grid(), refine=True)

    def test_optimum_location(self, fig2_sweep):
        assert 0.15 <= fig2_sweep.gamma_opt <= 0.40
        assert fig2_sweep.theta_max == pytest.approx(0.0967, abs=5e-4)

    def test_refined_point_inside_bracket(self, fig2_sweep):
        a, b = fig2_sweep.bracket
        assert b - a < 1e-3
        refined = fig2_sweep.gamma_grid[~fig2_sweep.coarse_mask]
        assert refined.size == 1
        assert a <= refined[0] <= b
        coarse = fig2_sweep.gamma_grid[fig2_sweep.coarse_mask]
        i = int(np.argmax(fig2_sweep.theta[fig2_sweep.coarse_mask]))
        assert coarse[i - 1] <= a and b <= coarse[i + 1]

    def test_optimum_beats_extremes(self, fig2_sweep):
        spec = fig2_chain()
        theta0 = theta_of_gamma(spec)
        assert fig2_sweep.theta_max > theta0
        assert fig2_sweep.theta_max > theta_of_gamma(spec.with_dephasing(10.0))
        assert theta_of_gamma(spec.with_dephasing(1000.0)) < theta_of_gamma(spec.with_dephasing(10.0))

    def test_theta_zero_is_twice_phi(self, fig2_sweep):
        assert fig2_sweep.theta[0] == pytest.approx(2 * fig2_sweep.phi[0], rel=1e-8)
        assert fig2_sweep.theta[0] == pytest.approx(0.0044475, abs=1e-6)

    def test_phi_nondecreasing(self, fig2_sweep):
        assert np.all(np.diff(fig2_sweep.phi) >= -1e-12)

    def test_constant_theta_picks_first_point(self):
        spec = NetworkSpec([[0]], [1.2], [0.2])
        res = run_sweep(spec, [0.0, 1.0, 2.0], refine=True)
        assert res.gamma_opt == 0.0
        np.testing.assert_allclose(res.theta[res.coarse_mask], 1.0)

    def test_callable_family(self):
        res = run_sweep(lambda g: NetworkSpec([[0]], [1.0 + g], [0.0]), [0.0, 1.0])
        np.testing.assert_allclose(res.theta, [1.0, 2.0])
        assert res.gamma_opt == 1.0

    def test_equilibria(self):
        spec = fig2_chain()
        res = run_sweep(spec, [0.0, 1.0], with_equilibria=True)
        assert len(res.equilibria) == 2
        np.testing.assert_allclose(res.equilibria[1], equilibrium(spec.with_dephasing(1.0)).c_eq)

    def test_thread_count_does_not_change_results(self):
        spec = fig2_chain()
        a = run_sweep(spec, [0.0, 0.2, 1.0, 5.0], threads=1)
        b = run_sweep(spec, [0.0, 0.2, 1.0, 5.0], threads=3)
        np.testing.assert_array_equal(a.theta, b.theta)
        np.testing.assert_array_equal(a.phi, b.phi)

    @pytest.mark.parametrize("grid", [[], [1.0, 0.5], [-1.0, 1.0], [0.0, 0.0]])
    def test_bad_grid(self, grid):
        with pytest.raises(ValueError):
            run_sweep(fig2_chain(), grid)

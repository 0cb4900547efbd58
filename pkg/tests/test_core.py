import math

import numpy as np
import pytest

from nlwrad.core import (
    InvalidParameterError,
    QuadratureTailWarning,
    hdot1_norm_sq,
    l2_norm_sq,
    lp1_norm_pow,
    make_grid,
    make_params,
    radial_integral,
    sphere_area,
)

PI = math.pi


class TestModelParams:
    def test_d3_p25_constants(self):
        p = make_params(3, 2.5)
        assert p.lam == pytest.approx(0.5, abs=1e-15)
        assert p.kappa_max == pytest.approx(0.5, abs=1e-15)

    def test_d3_p3_constants(self):
        p = make_params(3, 3.0)
        assert p.kappa_scatter == pytest.approx(0.5, abs=1e-15)
        assert p.beta == pytest.approx(0.5, abs=1e-15)

    def test_conformal_endpoint(self):
        # p -> 1 + 4/(d-1) from below drives lam -> 0+
        p = make_params(3, 3.0 - 1e-9)
        assert 0.0 < p.lam < 1e-8

    def test_scattering_threshold_d3(self):
        assert make_params(3, 2.7).p_scatter_min == pytest.approx(math.sqrt(7.0), abs=1e-14)

    @pytest.mark.parametrize("d,p", [(2, 2.5), (0, 2.0), (3, 1.0), (3, 0.5), (3.5, 2.0)])
    def test_invalid_parameters_rejected(self, d, p):
        with pytest.raises(InvalidParameterError):
            make_params(d, p)

    def test_admissibility_window_equivalences(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            d = int(rng.integers(3, 10))
            p = float(rng.uniform(1.01, 1.0 + 4.5 / (d - 1)))
            mp = make_params(d, p)
            in_window = 1 + 2 / (d - 1) < p < 1 + 4 / (d - 1)
            assert in_window == (0 < mp.lam < 1) == (0 < mp.kappa_max < 1)
            assert in_window == mp.in_theorem11_range
            # algebraically exact consequences of the defining formulas
            assert mp.beta == pytest.approx(2 * mp.kappa_max / (p + 1), rel=1e-13)
            assert mp.lam == pytest.approx(1 - mp.kappa_max, rel=1e-13)
            assert (p > mp.p_scatter_min) == (mp.kappa_scatter < mp.kappa_max)

    @pytest.mark.parametrize("d", [3, 4, 5, 6, 9])
    def test_scatter_threshold_is_exact_root(self, d):
        mp = make_params(d, make_params(d, 2.0).p_scatter_min)
        assert abs(mp.kappa_scatter - mp.kappa_max) < 1e-12


class TestSphereArea:
    def test_known_areas(self):
        assert sphere_area(3) == pytest.approx(4 * PI, rel=1e-15)
        assert sphere_area(4) == pytest.approx(2 * PI**2, rel=1e-15)
        assert sphere_area(5) == pytest.approx(8 * PI**2 / 3, rel=1e-14)
        assert sphere_area(6) == pytest.approx(PI**3, rel=1e-14)


class TestRadialIntegral:
    def test_zero(self):
        grid = make_grid(1 / 64, 4.0)
        assert radial_integral(np.zeros(grid.size), grid, 3) == 0.0

    def test_unit_ball_volume(self):
        # indicator of the unit ball; the half-value sample at the jump node
        # keeps the trapezoid second order (oracle: |B_1| = 4 pi / 3)
        errs = []
        for dr in (1 / 128, 1 / 256):
            grid = make_grid(dr, 2.0)
            f = np.where(grid.r < 1.0, 1.0, 0.0)
            f[grid.node_index(1.0)] = 0.5
            errs.append(abs(radial_integral(f, grid, 3) - 4 * PI / 3))
        assert errs[1] < 5e-5
        assert errs[0] / errs[1] > 3.8

    def test_gaussian(self):
        # c_3 int r^2 e^{-r^2} dr = pi^{3/2}; even integrand superconverges
        grid = make_grid(1 / 128, 10.0)
        val = radial_integral(np.exp(-grid.r**2), grid, 3)
        assert val == pytest.approx(PI**1.5, abs=1e-12)

    def test_linearity(self):
        grid = make_grid(1 / 64, 5.0)
        f = np.exp(-grid.r**2)
        g = np.exp(-2 * grid.r**2) * grid.r
        lhs = radial_integral(2.0 * f + 3.0 * g, grid, 4)
        rhs = 2.0 * radial_integral(f, grid, 4) + 3.0 * radial_integral(g, grid, 4)
        assert lhs == pytest.approx(rhs, rel=1e-13)

    def test_tail_warning(self):
        grid = make_grid(1 / 32, 4.0)
        with pytest.warns(QuadratureTailWarning):
            radial_integral(np.ones(grid.size), grid, 3)

    def test_shape_mismatch(self):
        grid = make_grid(1 / 32, 4.0)
        with pytest.raises(ValueError):
            radial_integral(np.zeros(5), grid, 3)

    def test_second_order_convergence_on_compact_support(self):
        # (1-r^2)_+^2 with the kink on a node; oracle 32 pi / 105
        exact = 32 * PI / 105
        errs = []
        for dr in (1 / 128, 1 / 256):
            grid = make_grid(dr, 2.0)
            f = np.clip(1.0 - grid.r**2, 0.0, None) ** 2
            errs.append(abs(radial_integral(f, grid, 3) - exact))
        assert errs[0] / errs[1] > 3.8


class TestNorms:
    def test_zero(self):
        grid = make_grid(1 / 64, 4.0)
        z = np.zeros(grid.size)
        assert hdot1_norm_sq(z, grid, 3) == 0.0
        assert l2_norm_sq(z, grid, 3) == 0.0
        assert lp1_norm_pow(z, 3.0, grid, 3) == 0.0

    def test_gaussian_hdot1(self):
        # u = e^{-r^2}, d = 3: ||u||_{H1dot}^2 = 3 (pi/2)^{3/2}
        grid = make_grid(1 / 128, 10.0)
        u_r = -2.0 * grid.r * np.exp(-grid.r**2)
        assert hdot1_norm_sq(u_r, grid, 3) == pytest.approx(3 * (PI / 2) ** 1.5, rel=1e-12)

    def test_gaussian_l4(self):
        # ||e^{-r^2}||_{L^4}^4 = pi^{3/2}/8 at d = 3
        grid = make_grid(1 / 128, 10.0)
        u = np.exp(-grid.r**2)
        assert lp1_norm_pow(u, 3.0, grid, 3) == pytest.approx(PI**1.5 / 8, rel=1e-12)

    def test_scaling_homogeneity(self):
        grid = make_grid(1 / 64, 8.0)
        u_r = -2.0 * grid.r * np.exp(-grid.r**2)
        base = hdot1_norm_sq(u_r, grid, 3)
        assert hdot1_norm_sq(2.5 * u_r, grid, 3) == pytest.approx(2.5**2 * base, rel=1e-14)


class TestGrid:
    def test_nodes(self):
        grid = make_grid(0.25, 2.0)
        assert grid.r[0] == 0.0
        assert grid.r_max == pytest.approx(2.0)
        assert np.allclose(np.diff(grid.r), 0.25)

    def test_node_index_bounds(self):
        grid = make_grid(0.25, 2.0)
        assert grid.node_index(1.0) == 4
        with pytest.raises(ValueError):
            grid.node_index(3.0)

    def test_invalid_spacing(self):
        with pytest.raises(InvalidParameterError):
            make_grid(-0.1, 2.0)

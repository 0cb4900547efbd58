import math

import numpy as np
import pytest

from nlwrad import evolve, init_from_profile, make_grid, make_params
from nlwrad.functionals import energy
from nlwrad.scattering import (
    characteristic_l2_window,
    characteristic_variation,
    extract_radiation,
    radiation_energy_deficit,
    scatter_defect,
    variation_bound_check,
)
from nlwrad.solver import Trajectory, init_outgoing
from tests.conftest import gaussian_run


def outgoing_linear_run(t_end=30.0, dr=1 / 64):
    a, sig, r0 = 1.0, 1.0, 8.0
    W = lambda r: a * math.exp(-(((r - r0) / sig) ** 2))
    dW = lambda r: -2.0 * (r - r0) / sig**2 * W(r)
    params = make_params(3, 2.5)
    grid = make_grid(dr, r0 + 6 * sig + t_end + 1)
    s = init_outgoing(W, dW, grid, params)
    return evolve(s, t_end, checkpoint_every=1.0, mode="linear"), dW


class TestExtractRadiation:
    def test_zero_solution(self):
        run = gaussian_run(3, 2.5, 1 / 32, 20.0, 1.0, amplitude=0.0)
        prof = extract_radiation(run.traj)
        assert not prof.g_plus.any()
        assert prof.l2_norm_sq() == 0.0

    def test_linear_pulse_profile_is_exact(self):
        # d=3 linear: v+ transports exactly, so g+(eta) = -W'(-eta)
        traj, dW = outgoing_linear_run()
        eta = -np.arange(4.0, 12.0, 1 / 64)[::-1]
        prof = extract_radiation(traj, eta)
        expected = np.asarray([-dW(-e) for e in eta])
        assert np.max(np.abs(prof.g_plus - expected)) <= 1e-12

    def test_unreachable_eta_rejected(self):
        traj, _ = outgoing_linear_run()
        with pytest.raises(ValueError):
            extract_radiation(traj, np.asarray([traj.t_end - 5.0]))  # r = 5 < 10
        with pytest.raises(ValueError):
            extract_radiation(traj, np.asarray([-200.0]))  # r beyond grid

    def test_l2_bound_and_deficit(self, scatter3):
        prof = extract_radiation(scatter3.traj)
        rd = radiation_energy_deficit(scatter3.traj, prof)
        E = rd["energy"]
        assert rd["radiated"] <= E * (1.0 + 1e-9)
        # the unradiated remainder matches the energy left inside the cone,
        # on the scale of the total energy
        assert abs(rd["deficit"] - rd["interior_energy"]) <= 0.05 * E

    def test_stability_under_doubling(self, scatter3):
        # the change of g+ between t_max/2 and t_max is controlled by the
        # fitted variation envelope integrated over eta
        traj = scatter3.traj
        eta = np.arange(-6.0, 30.0, 0.5)
        prof = extract_radiation(traj, eta)
        ok = np.isfinite(prof.tail)
        dg_l2_sq = float(np.trapezoid((prof.tail[ok] / 2.0) ** 2, prof.eta[ok]))
        vr = variation_bound_check(traj, eta_list=np.arange(-6.0, 7.0, 1.0))
        tau = prof.t_mid - prof.eta[ok]
        env = (vr.env_a * tau**-0.5 + vr.env_b * tau ** (-0.5 * scatter3.params.beta)) / 2.0
        env_l2_sq = float(np.trapezoid(env**2, prof.eta[ok]))
        assert dg_l2_sq <= env_l2_sq + 1e-12


class TestVariation:
    def test_zero_solution(self):
        run = gaussian_run(3, 2.5, 1 / 32, 30.0, 1.0, amplitude=0.0)
        assert characteristic_variation(run.traj, 2.0, 14.0, 28.0) == 0.0

    def test_linear_is_constant_along_characteristics(self):
        traj, _ = outgoing_linear_run()
        for eta in (-8.0, -6.0, -4.5):
            assert characteristic_variation(traj, eta, 10.0 + eta + 1, traj.t_end) == 0.0

    def test_window_validation(self, scatter3):
        with pytest.raises(ValueError):
            characteristic_variation(scatter3.traj, 5.0, 4.0, 20.0)  # t1 < eta
        with pytest.raises(ValueError):
            characteristic_variation(scatter3.traj, 0.0, 20.0, 10.0)  # t2 < t1

    def test_decay_slope_meets_bound(self, scatter3):
        vr = variation_bound_check(scatter3.traj, eta_list=np.arange(-6.0, 7.0, 1.0))
        assert vr.slope <= vr.slope_bound + 0.1
        # fitted envelope dominates every measured point
        env = vr.env_a * vr.taus**-0.5 + vr.env_b * vr.taus ** (-0.5 * scatter3.params.beta)
        assert np.all(vr.sup_dv <= env * (1.0 + 1e-9))


class TestScatterDefect:
    def test_zero_data(self):
        run = gaussian_run(3, 2.8, 1 / 32, 60.0, 1.0, amplitude=0.0)
        sd = scatter_defect(run.traj, [10.0, 20.0], 60.0)
        assert np.all(sd.delta == 0.0)

    def test_linear_run_has_zero_defect(self):
        # re-evolving a linear checkpoint linearly reproduces the trajectory
        run = gaussian_run(3, 2.8, 1 / 32, 60.0, 1.0, mode="linear")
        sd = scatter_defect(run.traj, [10.0, 30.0], 60.0)
        assert np.all(sd.delta <= 1e-6)

    def test_defect_ladder_decreases(self, scatter3):
        sd = scatter_defect(scatter3.traj, [20.0, 40.0, 70.0], 100.0)
        assert np.all(sd.delta >= 0.0)
        assert sd.delta[-1] <= 0.5 * sd.delta[0]
        # monotone within 5% of the first rung
        assert np.all(np.diff(sd.delta) <= 0.05 * sd.delta[0])

    def test_horizon_validation(self, scatter3):
        with pytest.raises(ValueError):
            scatter_defect(scatter3.traj, [20.0], 25.0)
        with pytest.raises(ValueError):
            scatter_defect(scatter3.traj, [20.0], 500.0)


class TestCharacteristicWindow:
    def test_zero_solution(self):
        run = gaussian_run(3, 2.8, 1 / 32, 40.0, 1.0, amplitude=0.0)
        prof = extract_radiation(run.traj)
        assert characteristic_l2_window(run.traj, 30.0, 1.0, 4.0, prof) == 0.0

    def test_linear_matches_profile(self):
        traj, _ = outgoing_linear_run(t_end=40.0)
        prof = extract_radiation(traj)
        mismatch = characteristic_l2_window(traj, 30.0, 1.0, 6.0, prof)
        assert mismatch <= 1e-20

    def test_rough_linearity_in_window_size(self, scatter3):
        prof = extract_radiation(scatter3.traj)
        t = 80.0
        v_full = characteristic_l2_window(scatter3.traj, t, 2.0, 5.0, prof)
        v_half = characteristic_l2_window(scatter3.traj, t, 1.0, 5.0, prof)
        assert v_full >= v_half * (1.0 - 1e-9)
        assert v_full <= 2.5 * max(v_half, 1e-30)

    def test_window_outside_grid(self, scatter3):
        with pytest.raises(ValueError):
            characteristic_l2_window(scatter3.traj, 90.0, 1.0, 1e6)

"""Acceptance suite: every primary criterion at its stated tolerance, one
pass/fail line per criterion (run with -s to see them inline).

The heavy trajectories are session-scoped fixtures shared across criteria;
the pointwise-ratio criterion is probed on every checkpoint of every run
created here.
"""

import math
import time
from types import SimpleNamespace

import numpy as np
import pytest

from nlwrad import evolve, init_from_profile, make_grid, make_params
from nlwrad.functionals import (
    ZeroFieldError,
    corollary_inequality,
    decay_report,
    energy,
    flux_energy,
    morawetz_identity,
    pointwise_bound_check,
    q_series,
)
from nlwrad.scattering import (
    extract_radiation,
    radiation_energy_deficit,
    scatter_defect,
    variation_bound_check,
)
from nlwrad.solver import init_outgoing

RATIO_RECORDS: list[tuple[str, float, float]] = []


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def evolve_with_ratio_probe(label, state, t_end, checkpoint_every, mode="nonlinear"):
    def ratio1(s):
        try:
            return pointwise_bound_check(s)[0]
        except ZeroFieldError:
            return 0.0

    traj = evolve(state, t_end, checkpoint_every, mode=mode, probes={"ratio1": ratio1})
    bound = ((state.params.d - 2) * state.params.c_d) ** -0.5
    RATIO_RECORDS.append((label, max(traj.records["ratio1"]), bound))
    return traj


def gaussian_state(d, p, dr, t_end):
    params = make_params(d, p)
    grid = make_grid(dr, math.ceil(7.0 + t_end + 1.0))
    state = init_from_profile(lambda r: math.exp(-r * r), lambda r: 0.0, grid, params)
    return params, grid, state


# ---------------------------------------------------------------------------
# shared heavy runs

@pytest.fixture(scope="module")
def energy_levels():
    out = []
    for dr in (1 / 64, 1 / 128, 1 / 256):
        params, grid, state = gaussian_state(3, 2.5, dr, 100.0)
        e0 = energy(state).total
        t0 = time.perf_counter()
        traj = evolve_with_ratio_probe(f"energy-1/{round(1/dr)}", state, 100.0, 1.0)
        wall = time.perf_counter() - t0
        drift = max(abs(energy(s).total - e0) for s in traj.states) / e0
        out.append(SimpleNamespace(dr=dr, drift=drift, wall=wall))
    return out


@pytest.fixture(scope="module")
def morawetz_suite():
    """(d, p) -> identity residual ladder at dr in {1/64, 1/128, 1/256} for
    R in {5, 10}, and the corollary sweep at the finest level."""
    suite = {}
    sweep = [(2, 0), (2, 3), (4, 0), (4, 3), (6, 0), (6, 3), (8, 0), (8, 3),
             (10, 0), (10, 5)]
    for d, p in ((3, 2.5), (4, 2.2), (5, 1.6)):
        ladders = {5.0: [], 10.0: []}
        for dr in (1 / 64, 1 / 128, 1 / 256):
            params, grid, state = gaussian_state(d, p, dr, 15.0)
            traj = evolve_with_ratio_probe(f"morawetz-d{d}-1/{round(1/dr)}",
                                           state, 15.0, 16 * dr)
            full = traj.merged(traj.reflect())
            for R in (5.0, 10.0):
                led = morawetz_identity(full, R, -10.0, 10.0)
                ladders[R].append(led.residual / led.energy2)
            if dr == 1 / 256:
                E = energy(state).total
                cors = [corollary_inequality(full, R, r) for R, r in sweep]
                suite[(d, p)] = SimpleNamespace(
                    ladders=ladders, energy=E,
                    slacks=[c.slack for c in cors])
    return suite


@pytest.fixture(scope="module")
def decay_d3():
    params, grid, state = gaussian_state(3, 2.8, 1 / 64, 200.0)
    traj = evolve_with_ratio_probe("decay-d3", state, 200.0, 1.0)
    return SimpleNamespace(params=params, grid=grid, state=state, traj=traj,
                           full=traj.merged(traj.reflect()))


@pytest.fixture(scope="module")
def decay_d4():
    params, grid, state = gaussian_state(4, 2.2, 1 / 64, 200.0)
    traj = evolve_with_ratio_probe("decay-d4", state, 200.0, 1.0)
    return SimpleNamespace(params=params, state=state, traj=traj)


# ---------------------------------------------------------------------------
# criteria

def test_energy_conservation(energy_levels):
    finest = energy_levels[-1]
    orders = [math.log2(a.drift / b.drift)
              for a, b in zip(energy_levels[:-1], energy_levels[1:])]
    ok = finest.drift <= 1e-4 and all(o >= 1.8 for o in orders) \
        and all(lv.wall <= 60.0 for lv in energy_levels)
    report("energy-conservation", ok,
           f"drift={finest.drift:.2e} (<=1e-4), orders={[f'{o:.2f}' for o in orders]} "
           f"(>=1.8), walls={[f'{lv.wall:.1f}s' for lv in energy_levels]} (<=60s)")
    assert finest.drift <= 1e-4
    assert all(o >= 1.8 for o in orders)
    assert all(lv.wall <= 60.0 for lv in energy_levels)


def test_d3_linear_exactness():
    # rightgoing pulse on [2,3]; max-norm change of the transported profile
    def W(r):
        x = (r - 2.5) / 0.5
        return (1 - x * x) ** 3 if abs(x) < 1 else 0.0

    def dW(r):
        x = (r - 2.5) / 0.5
        return -6.0 * x * (1 - x * x) ** 2 / 0.5 if abs(x) < 1 else 0.0

    params = make_params(3, 2.5)
    grid = make_grid(1 / 256, 12.0)
    s = init_outgoing(W, dW, grid, params)
    traj = evolve(s, 8.0, checkpoint_every=8.0, mode="linear")
    k = round(8.0 / grid.dr)
    err = float(np.max(np.abs(traj.states[-1].v_plus[k:] - s.v_plus[:-k])))
    report("d3-linear-exactness", err <= 1e-12, f"max-norm error={err:.2e} (<=1e-12)")
    assert err <= 1e-12


def test_morawetz_identity_residuals(morawetz_suite):
    for (d, p), res in morawetz_suite.items():
        for R, ladder in res.ladders.items():
            final = ladder[-1]
            orders = [math.log2(a / b) for a, b in zip(ladder[:-1], ladder[1:])]
            ok = final <= 0.01 and all(1.5 <= o <= 2.6 for o in orders)
            report("morawetz-identity", ok,
                   f"d={d} p={p} R={R}: residual/2E={final:.2e} (<=1e-2), "
                   f"orders={[f'{o:.2f}' for o in orders]} (~2)")
            assert final <= 0.01
            assert all(1.5 <= o <= 2.6 for o in orders)


def test_corollary_slack(morawetz_suite):
    for (d, p), res in morawetz_suite.items():
        worst = min(res.slacks) / res.energy
        ok = worst >= -0.02
        report("corollary-slack", ok,
               f"d={d} p={p}: min slack/E={worst:+.3e} (>=-0.02) over 10 windows")
        assert worst >= -0.02


def test_flux_decay(decay_d3, decay_d4):
    for run, label in ((decay_d3, "d=3 p=2.8"), (decay_d4, "d=4 p=2.2")):
        f1 = flux_energy(run.traj.state_at(1.0), "+")
        f200 = flux_energy(run.traj.state_at(200.0), "+")
        ratio = f200 / f1
        report("flux-decay", ratio <= 0.05, f"{label}: flux+(200)/flux+(1)={ratio:.2e} (<=0.05)")
        assert ratio <= 0.05


def test_weighted_q_decay(decay_d3):
    # data are compactly supported on the grid (gaussian below 1e-16 beyond
    # r ~ 6), so every weighted energy is finite
    kappa = 0.8 * decay_d3.params.kappa_scatter
    times = np.arange(0.0, 200.5, 1.0)
    qs = q_series(decay_d3.full, times)
    rep = decay_report(qs, kappa, tail_start=50.0, ref_time=10.0, drop_frac=0.2)
    ok = rep.tkq_decreasing and rep.tkq_drop
    report("weighted-q-decay", ok,
           f"kappa={kappa:.4f}: t^k Q decreasing on [50,200]={rep.tkq_decreasing}, "
           f"last/first(10)={rep.tkq_last / rep.tkq_first:.3f} (<=0.2)")
    assert rep.tkq_decreasing
    assert rep.tkq_drop


def test_characteristic_variation_decay(decay_d3):
    vr = variation_bound_check(decay_d3.traj, eta_list=np.arange(-6.0, 7.0, 1.0))
    bound = -min(0.5, 0.5 * decay_d3.params.beta) + 0.1
    ok = vr.slope <= bound
    report("variation-decay", ok, f"slope={vr.slope:.3f} (<= {bound:.3f})")
    assert vr.slope <= bound


def test_scattering_proxy(decay_d3):
    sd = scatter_defect(decay_d3.traj, [20.0, 40.0, 80.0], 160.0)
    ratio = sd.delta[-1] / sd.delta[0]
    prof = extract_radiation(decay_d3.traj)
    rd = radiation_energy_deficit(decay_d3.traj, prof)
    deficit_rel = rd["deficit"] / rd["energy"]
    ok = ratio <= 0.5 and deficit_rel <= 0.10
    report("scattering-proxy", ok,
           f"delta(80)/delta(20)={ratio:.3f} (<=0.5), "
           f"(E - c3||g+||^2)/E={deficit_rel:.3e} (<=0.10)")
    assert ratio <= 0.5
    assert deficit_rel <= 0.10


def test_pointwise_bound_on_all_runs(energy_levels, morawetz_suite, decay_d3, decay_d4):
    # every acceptance run above recorded its worst ratio on every checkpoint
    assert len(RATIO_RECORDS) >= 13
    worst_frac = 0.0
    for label, ratio, bound in RATIO_RECORDS:
        worst_frac = max(worst_frac, ratio / bound)
        assert ratio <= bound * 1.02, f"{label}: {ratio} > {bound} * 1.02"
    report("pointwise-bound", True,
           f"max ratio1/bound={worst_frac:.3f} (<=1.02) over {len(RATIO_RECORDS)} runs")

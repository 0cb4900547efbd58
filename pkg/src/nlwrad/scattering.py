"""Radiation-profile extraction along outgoing characteristics, variation
bounds of the characteristic differences, and the scattering defect.

On the outgoing ray of retarded time eta = t - r, v+(t - eta, t) converges
to twice a limiting profile g+(eta) as t grows; almost all of the energy of
a scattering solution is carried by that profile (c_d ||g+||^2 -> E).  The
scattering defect compares the nonlinear solution at a late horizon with the
free evolution launched from an earlier snapshot: a decreasing defect ladder
is the computable signature of convergence to a free wave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functionals import energy, interior_energy
from .solver import FieldState, Trajectory, evolve, state_distance_sq

__all__ = [
    "RadiationProfile",
    "ScatterDefectSeries",
    "VariationReport",
    "extract_radiation",
    "characteristic_variation",
    "variation_bound_check",
    "scatter_defect",
    "characteristic_l2_window",
]

MIN_EXTRACTION_RADIUS = 10.0


@dataclass(frozen=True)
class RadiationProfile:
    """g+ sampled on retarded times eta = t_final - r, with the per-eta
    variation since t_final/2 as a convergence (Cauchy-tail) indicator."""

    eta: np.ndarray
    g_plus: np.ndarray
    tail: np.ndarray
    t_final: float
    t_mid: float

    def l2_norm_sq(self) -> float:
        return float(np.trapezoid(self.g_plus**2, self.eta))

    def interp(self, eta: np.ndarray) -> np.ndarray:
        return np.interp(eta, self.eta, self.g_plus, left=0.0, right=0.0)


def extract_radiation(traj: Trajectory, eta_grid: np.ndarray | None = None) -> RadiationProfile:
    """Read g+(eta) = v+(t_final - eta, t_final) / 2 off the last checkpoint.

    eta values must satisfy t_final - eta in [MIN_EXTRACTION_RADIUS, r_max];
    the default grid covers that whole reachable window at node spacing.
    The tail column records |v+ at t_final - v+ at ~t_final/2| along the
    same characteristic (nan where the mid-time slice cannot see it).
    """
    s_end = traj.states[-1]
    t_final = s_end.t
    grid = s_end.grid
    dr = grid.dr
    if eta_grid is None:
        j_lo = max(1, grid.node_index(MIN_EXTRACTION_RADIUS))
        eta_grid = t_final - grid.r[grid.n:j_lo - 1:-1]  # ascending eta
    eta_grid = np.asarray(eta_grid, dtype=float)

    r_pos = t_final - eta_grid
    if np.any(r_pos < MIN_EXTRACTION_RADIUS - 1e-9) or np.any(r_pos > grid.r_max + 1e-9):
        raise ValueError("eta outside the reachable cone "
                         f"[{t_final - grid.r_max:g}, {t_final - MIN_EXTRACTION_RADIUS:g}]")

    s_mid = traj.state_at(t_final / 2.0, tol=0.5 * traj.checkpoint_spacing + 1e-9) \
        if len(traj.states) > 2 else traj.states[0]
    t_mid = s_mid.t

    j_end = np.rint(r_pos / dr).astype(int)
    g_plus = 0.5 * s_end.v_plus[j_end]
    tail = np.full_like(g_plus, np.nan)
    r_mid = t_mid - eta_grid
    ok = (r_mid >= dr) & (r_mid <= grid.r_max)
    j_mid = np.rint(np.where(ok, r_mid, dr) / dr).astype(int)
    tail[ok] = np.abs(s_end.v_plus[j_end[ok]] - s_mid.v_plus[j_mid[ok]])
    return RadiationProfile(eta=eta_grid, g_plus=g_plus, tail=tail,
                            t_final=t_final, t_mid=t_mid)


def radiated_energy(profile: RadiationProfile, params) -> float:
    """c_d ||g+||^2, the energy carried by the extracted profile."""
    return params.c_d * profile.l2_norm_sq()


def characteristic_variation(traj: Trajectory, eta: float, t1: float, t2: float) -> float:
    """|v+(t2 - eta, t2) - v+(t1 - eta, t1)| along one outgoing ray.

    The times snap to checkpoints; positions are then taken at the snapped
    times so both samples stay on the same characteristic t - r = eta."""
    if not (t2 > t1 > eta):
        raise ValueError(f"need t2 > t1 > eta, got eta={eta:g}, t1={t1:g}, t2={t2:g}")
    s1 = traj.state_at(t1)
    s2 = traj.state_at(t2)
    grid = s1.grid
    j1 = grid.node_index(s1.t - eta)
    j2 = grid.node_index(s2.t - eta)
    return float(abs(s2.v_plus[j2] - s1.v_plus[j1]))


@dataclass(frozen=True)
class VariationReport:
    """sup over eta of the characteristic variation, per separation tau =
    t1 - eta, with the fitted log-log slope and the smallest dominating
    envelope A tau^{-1/2} + B tau^{-beta/2}."""

    taus: np.ndarray
    sup_dv: np.ndarray
    slope: float
    slope_bound: float
    env_a: float
    env_b: float


def _nonneg_lstsq_2(col_a: np.ndarray, col_b: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Nonnegative least squares with two columns (tiny active-set solve)."""
    best: tuple[float, float] | None = None
    best_res = math.inf
    M = np.column_stack([col_a, col_b])
    x, *_ = np.linalg.lstsq(M, y, rcond=None)
    candidates = [x]
    for keep, other in ((0, 1), (1, 0)):
        c = np.zeros(2)
        col = M[:, keep]
        c[keep] = max(0.0, float(col @ y) / float(col @ col))
        candidates.append(c)
    for c in candidates:
        if np.any(np.asarray(c) < 0):
            continue
        res = float(np.sum((M @ c - y) ** 2))
        if res < best_res:
            best_res = res
            best = (float(c[0]), float(c[1]))
    return best if best is not None else (0.0, 0.0)


def variation_bound_check(traj: Trajectory, eta_list, tau_list=None,
                          t2: float | None = None) -> VariationReport:
    """Sweep (eta, tau) with t1 = eta + tau and measure the decay of
    sup_eta |Delta v+| in tau; the fitted slope should be at least as steep
    as -min(1/2, beta/2)."""
    s0 = traj.states[0]
    beta = s0.params.beta
    if t2 is None:
        t2 = traj.t_end
    if tau_list is None:
        cs = max(traj.checkpoint_spacing, s0.grid.dr)
        lo = int(math.ceil(10.0 / cs))
        hi = int(math.floor(100.0 / cs))
        idx = np.unique(np.rint(np.geomspace(lo, hi, 25)).astype(int))
        tau_list = idx * cs
    taus = np.asarray(tau_list, dtype=float)

    sup_dv = np.zeros_like(taus)
    for i, tau in enumerate(taus):
        best = 0.0
        for eta in eta_list:
            t1 = eta + tau
            if not (t2 > t1 > eta + 1.0):
                continue
            best = max(best, characteristic_variation(traj, eta, t1, t2))
        sup_dv[i] = best

    mask = sup_dv > 0
    if np.count_nonzero(mask) < 3:
        raise ValueError("not enough usable (eta, tau) pairs in the sweep")
    slope = float(np.polyfit(np.log(taus[mask]), np.log(sup_dv[mask]), 1)[0])

    col_a = taus[mask] ** -0.5
    col_b = taus[mask] ** (-0.5 * beta)
    a, b = _nonneg_lstsq_2(col_a, col_b, sup_dv[mask])
    env = a * col_a + b * col_b
    scale = float(np.max(sup_dv[mask] / np.maximum(env, 1e-300))) if np.any(env > 0) else math.inf
    if math.isfinite(scale) and scale > 1.0:
        a, b = a * scale, b * scale
    return VariationReport(taus=taus[mask], sup_dv=sup_dv[mask], slope=slope,
                           slope_bound=-min(0.5, 0.5 * beta), env_a=a, env_b=b)


@dataclass(frozen=True)
class ScatterDefectSeries:
    """H^1-dot x L^2 distance at the horizon t_horizon between the nonlinear
    solution and the free flow released from each snapshot time."""

    t_release: np.ndarray
    delta: np.ndarray
    t_horizon: float


def scatter_defect(traj_nonlinear: Trajectory, t1_list, t2: float) -> ScatterDefectSeries:
    """For each release time T1: evolve the T1 snapshot linearly to T2 and
    measure the H^1-dot x L^2 distance from the nonlinear state at T2."""
    t1s = np.asarray(sorted(t1_list), dtype=float)
    if t2 < float(t1s.max()) + 10.0:
        raise ValueError(f"horizon t2={t2:g} must exceed max release time by >= 10")
    if t2 > traj_nonlinear.t_end + 1e-9:
        raise ValueError(f"horizon t2={t2:g} beyond trajectory end {traj_nonlinear.t_end:g}")
    target = traj_nonlinear.state_at(t2)
    deltas = []
    for t1 in t1s:
        snap = traj_nonlinear.state_at(t1)
        lin = evolve(snap, t2, checkpoint_every=t2 - snap.t, mode="linear",
                     check_support=False).states[-1]
        h1, l2 = state_distance_sq(lin, target)
        deltas.append(math.sqrt(h1 + l2))
    return ScatterDefectSeries(t_release=t1s, delta=np.asarray(deltas), t_horizon=t2)


def characteristic_l2_window(traj: Trajectory, t: float, c: float, R: float,
                             profile: RadiationProfile | None = None) -> float:
    """Windowed L^2 mismatch between v+ at time t and the extracted profile:

        integral over [t - c t^beta, t + R] of |v+(r, t) - 2 g+(t - r)|^2 dr.
    """
    s = traj.state_at(t)
    grid = s.grid
    beta = s.params.beta
    if profile is None:
        profile = extract_radiation(traj)
    r_lo = t - c * t**beta
    r_hi = t + R
    if r_lo < 0 or r_hi > grid.r_max + 1e-9:
        raise ValueError(f"window [{r_lo:g}, {r_hi:g}] outside grid [0, {grid.r_max:g}]")
    j_lo = grid.node_index(r_lo)
    j_hi = grid.node_index(min(r_hi, grid.r_max))
    rr = grid.r[j_lo:j_hi + 1]
    mismatch = s.v_plus[j_lo:j_hi + 1] - 2.0 * profile.interp(t - rr)
    return float(np.trapezoid(mismatch**2, dx=grid.dr))


def radiation_energy_deficit(traj: Trajectory, profile: RadiationProfile) -> dict:
    """E - c_d ||g+||^2 compared with the energy still inside the light cone
    (radius t_final - MIN_EXTRACTION_RADIUS) at the final time."""
    s_end = traj.states[-1]
    params = s_end.params
    E = energy(traj.states[0]).total
    radiated = radiated_energy(profile, params)
    interior = interior_energy(s_end, max(s_end.t - MIN_EXTRACTION_RADIUS, 0.0))
    return {"energy": E, "radiated": radiated, "deficit": E - radiated,
            "interior_energy": interior}

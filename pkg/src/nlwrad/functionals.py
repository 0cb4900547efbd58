"""Integral functionals of the evolved fields: energies, the space-time
multiplier identity and its windowed inequality, the composite decay
functional Q(t), and the pointwise decay ratios.

All spatial integrals are evaluated in w-form, where the volume weight
r^{d-1} cancels exactly:

    |u_t|^2 r^{d-1} = w_t^2,    |u_r|^2 r^{d-1} = q^2,
    |u|^2 r^{d-1} = w^2,        |u|^{p+1} r^{d-1} = |w|^{p+1} r^{-gamma},

with q = w_r - (d-1) w / (2r) and gamma = (d-1)(p-1)/2.  Angular-gradient
terms vanish identically for radial data and are carried as zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RadialGrid
from .solver import FieldState, Trajectory, w_fields

__all__ = [
    "EnergyBreakdown",
    "MorawetzLedger",
    "CorollaryLedger",
    "QSample",
    "QSeries",
    "DecayReport",
    "ZeroFieldError",
    "energy",
    "morawetz_multiplier",
    "morawetz_flux_terms",
    "morawetz_identity",
    "corollary_inequality",
    "q_functional",
    "q_series",
    "decay_report",
    "weighted_interior_energy",
    "flux_energy",
    "exterior_mass_tail",
    "pointwise_bound_check",
]

DEFAULT_C1 = 0.125
DEFAULT_C2 = 0.125


class ZeroFieldError(ValueError):
    """A ratio diagnostic was asked of an identically-zero state."""


# ---------------------------------------------------------------------------
# small quadrature helpers (trapezoid on the solver grid)

def _int1d(g: np.ndarray, grid: RadialGrid, cd: float) -> float:
    return cd * float(np.trapezoid(g, dx=grid.dr))


def _int1d_range(g: np.ndarray, grid: RadialGrid, cd: float, j0: int, j1: int) -> float:
    if j1 <= j0:
        return 0.0
    return cd * float(np.trapezoid(g[j0:j1 + 1], dx=grid.dr))


def _pot_density(state: FieldState) -> np.ndarray:
    """|u|^{p+1} r^{d-1} = |w|^{p+1} r^{-gamma} (zero at the origin node)."""
    r = state.grid.r
    g = np.zeros_like(r)
    g[1:] = np.abs(state.w[1:]) ** (state.params.p + 1) * r[1:] ** (-state.params.source_exponent)
    return g


def _time_trapezoid(traj: Trajectory, t1: float, t2: float, f) -> float:
    """Trapezoid of f(state) over the checkpoints spanning [t1, t2]; t1 and
    t2 must coincide with checkpoints (within half a spacing)."""
    ts = traj.times
    tol = 0.5 * traj.checkpoint_spacing + 1e-12
    i1 = int(np.argmin(np.abs(ts - t1)))
    i2 = int(np.argmin(np.abs(ts - t2)))
    if abs(ts[i1] - t1) > tol or abs(ts[i2] - t2) > tol or i2 <= i1:
        raise ValueError(f"window [{t1:g}, {t2:g}] not covered by checkpoints "
                         f"[{ts[0]:g}, {ts[-1]:g}]")
    vals = np.asarray([f(traj.states[i]) for i in range(i1, i2 + 1)])
    return float(np.trapezoid(vals, ts[i1:i2 + 1]))


# ---------------------------------------------------------------------------
# energies

@dataclass(frozen=True)
class EnergyBreakdown:
    """Kinetic / radial-gradient / potential split of the conserved energy,
    plus weighted energies with weight |x|^kappa + 1."""

    kinetic: float
    gradient: float
    potential: float
    total: float
    e_kappa: dict[float, float]


def energy(state: FieldState, kappas: tuple[float, ...] = ()) -> EnergyBreakdown:
    w, w_t, _, q = w_fields(state)
    grid, cd = state.grid, state.params.c_d
    pot = _pot_density(state) / (state.params.p + 1.0)
    kin = _int1d(0.5 * w_t ** 2, grid, cd)
    grad = _int1d(0.5 * q ** 2, grid, cd)
    potential = _int1d(pot, grid, cd)
    e1d = 0.5 * w_t ** 2 + 0.5 * q ** 2 + pot
    ek = {float(k): _int1d((grid.r ** k + 1.0) * e1d, grid, cd) for k in kappas}
    return EnergyBreakdown(kinetic=kin, gradient=grad, potential=potential,
                           total=kin + grad + potential, e_kappa=ek)


def _energy_ref(traj: Trajectory, nonlinear_terms: bool) -> float:
    """Conserved-energy reference: evaluated at the checkpoint nearest t=0
    (the data slice); the potential is dropped for free-wave ledgers."""
    s0 = traj.states[int(np.argmin(np.abs(traj.times)))]
    e = energy(s0)
    return e.total if nonlinear_terms else e.kinetic + e.gradient


# ---------------------------------------------------------------------------
# multiplier and its space-time identity

def _snap_radius(grid: RadialGrid, R: float) -> tuple[int, float]:
    j = grid.node_index(R)
    if j == 0:
        raise ValueError("window radius must be positive")
    return j, float(grid.r[j])


def morawetz_multiplier(state: FieldState, R: float) -> float:
    """The multiplier functional: integral of u_t (min(r,R) u_r + psi u)
    with psi = (d-1)/2 inside r <= R and R(d-1)/(2r) outside."""
    d = state.params.d
    jR, Rs = _snap_radius(state.grid, R)
    w, w_t, _, q = w_fields(state)
    r = state.grid.r
    psi = np.empty_like(r)
    psi[:jR + 1] = (d - 1) / 2.0
    psi[jR:] = Rs * (d - 1) / (2.0 * r[jR:])
    integrand = w_t * (np.minimum(r, Rs) * q + psi * w)
    return _int1d(integrand, state.grid, state.params.c_d)


def morawetz_flux_terms(state: FieldState, R: float,
                        nonlinear_terms: bool = True) -> tuple[float, float, float]:
    """The three bulk terms whose sum equals minus the time derivative of the
    multiplier functional (used as an independent cross-check)."""
    d, p = state.params.d, state.params.p
    cd = state.params.c_d
    grid = state.grid
    jR, Rs = _snap_radius(grid, R)
    w, w_t, _, q = w_fields(state)
    r = grid.r
    n = grid.n

    i1 = 0.5 * _int1d_range(q ** 2 + w_t ** 2, grid, cd, 0, jR)

    w2_over_r3 = np.zeros_like(r)
    w2_over_r3[1:] = w[1:] ** 2 / r[1:] ** 3
    i2 = (d - 1) / (4.0 * Rs) * cd * w[jR] ** 2 \
        + (d - 3) * (d - 1) / 4.0 * _int1d_range(w2_over_r3, grid, cd, jR, n)

    if nonlinear_terms:
        pot = _pot_density(state)
        pot_over_r = np.zeros_like(r)
        pot_over_r[1:] = pot[1:] / r[1:]
        i3 = ((d - 1) * (p - 1) - 2.0) / (2.0 * (p + 1.0)) * _int1d_range(pot, grid, cd, 0, jR) \
            + (p - 1) * (d - 1) * Rs / (2.0 * (p + 1.0)) * _int1d_range(pot_over_r, grid, cd, jR, n)
    else:
        i3 = 0.0
    return i1, i2, i3


@dataclass(frozen=True)
class MorawetzLedger:
    """Every term of the space-time identity on the window (R, t1, t2); they
    must sum to twice the conserved energy."""

    R: float
    t1: float
    t2: float
    interior_bulk: float
    sphere_trace: float
    exterior_bulk: float
    boundary_interior: tuple[float, float]
    boundary_exterior: tuple[float, float]
    total: float
    energy2: float
    residual: float


def _boundary_terms(state: FieldState, jR: int, Rs: float, sign: float,
                    nonlinear_terms: bool) -> tuple[float, float]:
    """Completed-square boundary integrands at one time slice; sign is the
    coefficient of u_t in the squares (-1 at t1, +1 at t2)."""
    d, p = state.params.d, state.params.p
    cd = state.params.c_d
    grid = state.grid
    r = grid.r
    n = grid.n
    w, w_t, w_r, q = w_fields(state)
    pot = _pot_density(state) / (p + 1.0) if nonlinear_terms else np.zeros_like(r)

    sq_in = (r / Rs) * q + (d - 1) * w / (2.0 * Rs) + sign * w_t
    g_in = ((Rs ** 2 - r ** 2) / (2.0 * Rs ** 2)) * q ** 2 + 0.5 * sq_in ** 2 \
        + (d * d - 1) * w ** 2 / (8.0 * Rs ** 2) + pot
    interior = _int1d_range(g_in, grid, cd, 0, jR)

    # q + (d-1) w/(2r) collapses to w_r exactly, so the exterior square is
    # (w_r + sign*w_t)^2, i.e. v-^2 or v+^2
    w2_over_r2 = np.zeros_like(r)
    w2_over_r2[1:] = w[1:] ** 2 / r[1:] ** 2
    g_ex = 0.5 * (w_r + sign * w_t) ** 2 + pot + (d - 1) * (d - 3) * w2_over_r2 / 8.0
    exterior = _int1d_range(g_ex, grid, cd, jR, n)
    return interior, exterior


def morawetz_identity(traj: Trajectory, R: float, t1: float, t2: float,
                      nonlinear_terms: bool = True,
                      energy_ref: float | None = None) -> MorawetzLedger:
    """Assemble the identity terms over [t1, t2] from trajectory checkpoints;
    time integrals use the checkpoint trapezoid.  With nonlinear_terms=False
    the |u|^{p+1} terms are dropped, which is the free-wave form of the
    identity (cross-check for linear-mode runs)."""
    if t2 <= t1:
        raise ValueError("need t1 < t2")
    s0 = traj.states[0]
    d, p = s0.params.d, s0.params.p
    cd = s0.params.c_d
    grid = s0.grid
    jR, Rs = _snap_radius(grid, R)
    n = grid.n

    cf_in = ((d - 1) * (p - 1) - 2.0) / (p + 1.0)
    cf_ex_pot = (d - 1) * (p - 1) / (2.0 * (p + 1.0))
    cf_ex_mass = (d - 3) * (d - 1) / 4.0

    def bulk_interior(s: FieldState) -> float:
        _, w_t, _, q = w_fields(s)
        g = q ** 2 + w_t ** 2
        if nonlinear_terms:
            g = g + cf_in * _pot_density(s)
        return _int1d_range(g, grid, cd, 0, jR) / (2.0 * Rs)

    def sphere(s: FieldState) -> float:
        return (d - 1) / (4.0 * Rs ** 2) * cd * s.w[jR] ** 2

    def bulk_exterior(s: FieldState) -> float:
        r = grid.r
        g = np.zeros_like(r)
        g[1:] = cf_ex_mass * s.w[1:] ** 2 / r[1:] ** 3
        if nonlinear_terms:
            g[1:] += cf_ex_pot * _pot_density(s)[1:] / r[1:]
        return _int1d_range(g, grid, cd, jR, n)

    interior_bulk = _time_trapezoid(traj, t1, t2, bulk_interior)
    sphere_trace = _time_trapezoid(traj, t1, t2, sphere)
    exterior_bulk = _time_trapezoid(traj, t1, t2, bulk_exterior)

    b_in = []
    b_ex = []
    for t_i, sign in ((t1, -1.0), (t2, +1.0)):
        s = traj.state_at(t_i)
        bi, be = _boundary_terms(s, jR, Rs, sign, nonlinear_terms)
        b_in.append(bi)
        b_ex.append(be)

    total = interior_bulk + sphere_trace + exterior_bulk + sum(b_in) + sum(b_ex)
    e2 = 2.0 * (_energy_ref(traj, nonlinear_terms) if energy_ref is None else energy_ref)
    return MorawetzLedger(R=Rs, t1=t1, t2=t2, interior_bulk=interior_bulk,
                          sphere_trace=sphere_trace, exterior_bulk=exterior_bulk,
                          boundary_interior=(b_in[0], b_in[1]),
                          boundary_exterior=(b_ex[0], b_ex[1]),
                          total=total, energy2=e2, residual=abs(total - e2))


@dataclass(frozen=True)
class CorollaryLedger:
    """The six windowed terms M1..M6 and the weighted-data right-hand side;
    slack = rhs - sum(M) should be nonnegative up to discretization.

    interior_energy_term is the averaged interior energy flow
    (1/2R) int_{-R}^{R} int_{|x|<R} (|grad u|^2 + |u_t|^2 + 2|u|^{p+1}/(p+1)),
    which restates the identity as interior_energy_term + sum(M) = 2E."""

    R: float
    r: float
    m: tuple[float, float, float, float, float, float]
    rhs: float
    slack: float
    interior_energy_term: float


def corollary_inequality(traj: Trajectory, R: float, r: float) -> CorollaryLedger:
    """Evaluate the windowed inequality for the symmetric window
    [-(R+r), R+r]; the trajectory must span it (merge a reflected backward
    run with the forward run for two-sided data)."""
    if r < 0:
        raise ValueError("need r >= 0")
    s0 = traj.states[int(np.argmin(np.abs(traj.times)))]
    d, p = s0.params.d, s0.params.p
    cd = s0.params.c_d
    grid = s0.grid
    jR, Rs = _snap_radius(grid, R)
    n = grid.n
    t_edge = Rs + r
    ts = traj.times
    if ts[0] > -t_edge + 1e-9 or ts[-1] < t_edge - 1e-9:
        raise ValueError(f"trajectory [{ts[0]:g}, {ts[-1]:g}] does not span "
                         f"[-{t_edge:g}, {t_edge:g}]")

    cf_in = ((d - 1) * (p - 1) - 2.0) / (p + 1.0)
    cf_ex_pot = (d - 1) * (p - 1) / (2.0 * (p + 1.0))
    cf_ex_mass = (d - 3) * (d - 1) / 4.0

    def bulk_interior(s: FieldState) -> float:
        _, w_t, _, q = w_fields(s)
        g = q ** 2 + w_t ** 2 + cf_in * _pot_density(s)
        return _int1d_range(g, grid, cd, 0, jR) / (2.0 * Rs)

    def pot_interior(s: FieldState) -> float:
        return _int1d_range(_pot_density(s), grid, cd, 0, jR)

    def energy_interior(s: FieldState) -> float:
        _, w_t, _, q = w_fields(s)
        g = q ** 2 + w_t ** 2 + 2.0 / (p + 1.0) * _pot_density(s)
        return _int1d_range(g, grid, cd, 0, jR) / (2.0 * Rs)

    def sphere(s: FieldState) -> float:
        return (d - 1) / (4.0 * Rs ** 2) * cd * s.w[jR] ** 2

    def bulk_exterior(s: FieldState) -> float:
        rr = grid.r
        g = np.zeros_like(rr)
        g[1:] = cf_ex_mass * s.w[1:] ** 2 / rr[1:] ** 3 + cf_ex_pot * _pot_density(s)[1:] / rr[1:]
        return _int1d_range(g, grid, cd, jR, n)

    if r > 0:
        m1 = _time_trapezoid(traj, -t_edge, -Rs, bulk_interior) \
            + _time_trapezoid(traj, Rs, t_edge, bulk_interior)
    else:
        m1 = 0.0
    m2 = ((d - 1) * (p - 1) - 4.0) / (2.0 * (p + 1.0) * Rs) \
        * _time_trapezoid(traj, -Rs, Rs, pot_interior)
    m3 = _time_trapezoid(traj, -t_edge, t_edge, sphere)
    m4 = _time_trapezoid(traj, -t_edge, t_edge, bulk_exterior)

    m5 = 0.0
    m6 = 0.0
    for t_i, sign in ((-t_edge, -1.0), (t_edge, +1.0)):
        s = traj.state_at(t_i)
        bi, be = _boundary_terms(s, jR, Rs, sign, nonlinear_terms=True)
        m5 += bi
        m6 += be

    data = traj.state_at(0.0)
    _, w_t, _, q = w_fields(data)
    weight = np.minimum(grid.r / Rs, 1.0)
    g = weight * (q ** 2 + w_t ** 2 + 2.0 / (p + 1.0) * _pot_density(data))
    rhs = _int1d(g, grid, cd)

    m = (m1, m2, m3, m4, m5, m6)
    return CorollaryLedger(R=Rs, r=r, m=m, rhs=rhs, slack=rhs - sum(m),
                           interior_energy_term=_time_trapezoid(traj, -Rs, Rs, energy_interior))


# ---------------------------------------------------------------------------
# the composite decay functional Q(t)

@dataclass(frozen=True)
class QSample:
    t: float
    total: float
    lp1_part: float
    interior_part: float
    flux_part: float


@dataclass(frozen=True)
class QSeries:
    times: np.ndarray
    total: np.ndarray
    lp1_part: np.ndarray
    interior_part: np.ndarray
    flux_part: np.ndarray


def q_functional(forward_state: FieldState, backward_state: FieldState,
                 c1: float = DEFAULT_C1, c2: float = DEFAULT_C2) -> QSample:
    """One sample of Q(t) from the slices u(., t) and u(., -t).

    backward_state must be the time -t slice (reflect a backward run, or
    reuse the forward state when the data are time-symmetric).  For d >= 4
    the flux part integrates |u_r ± u_t|^2 over all of space; for d = 3 it
    keeps that square inside |x| < t and switches to the completed square
    |u_r + u/|x| ± u_t|^2 outside, whose w-form is exactly (w_r ± w_t)^2.
    """
    t = forward_state.t
    grid = forward_state.grid
    dt = grid.dr
    if t < -1e-12:
        raise ValueError("forward_state must have t >= 0")
    if abs(backward_state.t + t) > 0.25 * dt:
        raise ValueError(f"state times mismatch: {t:g} vs {backward_state.t:g}")
    d, p = forward_state.params.d, forward_state.params.p
    cd = forward_state.params.c_d
    r = grid.r
    n = grid.n

    lp1 = 0.0
    interior = 0.0
    flux = 0.0
    jt = min(int(round(t / dt)), n)
    for s, sign in ((forward_state, +1.0), (backward_state, -1.0)):
        _, w_t, w_r, q = w_fields(s)
        lp1 += _int1d(_pot_density(s), grid, cd) / (p + 1.0)
        if t > 0:
            weight = np.clip((t - r) / t, 0.0, None)
            interior += c1 * _int1d(weight * (q ** 2 + w_t ** 2), grid, cd)
        if d >= 4:
            flux += c2 * _int1d((q + sign * w_t) ** 2, grid, cd)
        else:
            flux += c2 * _int1d_range((q + sign * w_t) ** 2, grid, cd, 0, jt)
            flux += c2 * _int1d_range((w_r + sign * w_t) ** 2, grid, cd, jt, n)
    return QSample(t=t, total=lp1 + interior + flux, lp1_part=lp1,
                   interior_part=interior, flux_part=flux)


def q_series(traj: Trajectory, times: np.ndarray,
             c1: float = DEFAULT_C1, c2: float = DEFAULT_C2) -> QSeries:
    """Q at the requested times; traj must contain checkpoints at both +t
    and -t (use Trajectory.merged with a reflected backward run)."""
    samples = [q_functional(traj.state_at(t), traj.state_at(-t), c1, c2) for t in times]
    return QSeries(times=np.asarray([s.t for s in samples]),
                   total=np.asarray([s.total for s in samples]),
                   lp1_part=np.asarray([s.lp1_part for s in samples]),
                   interior_part=np.asarray([s.interior_part for s in samples]),
                   flux_part=np.asarray([s.flux_part for s in samples]))


@dataclass(frozen=True)
class DecayReport:
    kappa: float
    slope: float
    tkq_decreasing: bool
    tkq_drop: bool
    tkq_first: float
    tkq_last: float


def decay_report(series: QSeries, kappa: float, tail_start: float = 50.0,
                 ref_time: float = 10.0, drop_frac: float = 0.2) -> DecayReport:
    """Log-log slope of Q(t) plus the t^kappa Q(t) diagnostics: is the tail
    (t >= tail_start) monotonically decreasing, and has the last value
    dropped below drop_frac times the value at the first sample past
    ref_time."""
    mask = (series.times > 0) & (series.total > 0)
    t = series.times[mask]
    qv = series.total[mask]
    if len(t) < 10 or t[-1] < 10.0 * t[0]:
        raise ValueError("need at least 10 samples spanning a decade of t")
    slope = float(np.polyfit(np.log(t), np.log(qv), 1)[0])

    g = t ** kappa * qv
    tail = g[t >= tail_start]
    decreasing = bool(len(tail) >= 2 and np.all(np.diff(tail) <= 1e-9 * tail[:-1]))
    ref_idx = int(np.argmax(t >= ref_time))
    first, last = float(g[ref_idx]), float(g[-1])
    drop = bool(last <= drop_frac * first)
    return DecayReport(kappa=kappa, slope=slope, tkq_decreasing=decreasing,
                       tkq_drop=drop, tkq_first=first, tkq_last=last)


# ---------------------------------------------------------------------------
# energy-distribution diagnostics

def interior_energy(state: FieldState, radius: float) -> float:
    """Energy contained in |x| <= radius at the state's time."""
    grid = state.grid
    j = grid.node_index(min(radius, grid.r_max))
    _, w_t, _, q = w_fields(state)
    e1d = 0.5 * w_t ** 2 + 0.5 * q ** 2 + _pot_density(state) / (state.params.p + 1.0)
    return _int1d_range(e1d, grid, state.params.c_d, 0, j)


def weighted_interior_energy(state: FieldState) -> float:
    """integral over |x| < t of ((t - |x|)/t) e(x, t) dx; needs t > 0."""
    t = state.t
    if t <= 0:
        raise ValueError("weighted interior energy needs t > 0")
    _, w_t, _, q = w_fields(state)
    grid = state.grid
    weight = np.clip((t - grid.r) / t, 0.0, None)
    e1d = 0.5 * w_t ** 2 + 0.5 * q ** 2 + _pot_density(state) / (state.params.p + 1.0)
    return _int1d(weight * e1d, grid, state.params.c_d)


def flux_energy(state: FieldState, sign) -> float:
    """integral of |u_r ± u_t|^2 + |u|^{p+1}; sign '+' measures the
    non-outgoing content (vanishing as t -> +infinity)."""
    s = {"+": 1.0, "-": -1.0, 1: 1.0, -1: -1.0}.get(sign)
    if s is None:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    _, w_t, _, q = w_fields(state)
    g = (q + s * w_t) ** 2 + _pot_density(state)
    return _int1d(g, state.grid, state.params.c_d)


def exterior_mass_tail(state: FieldState) -> float:
    """integral over |x| > t of |u|^2/|x|^2 dx; only defined at d = 3, the
    dimension whose windowed inequality lacks the exterior Hardy term."""
    if state.params.d != 3:
        raise ValueError("exterior mass tail applies to d = 3 only")
    if state.t <= 0:
        raise ValueError("needs t > 0")
    grid = state.grid
    jt = grid.node_index(min(state.t, grid.r_max))
    g = np.zeros_like(grid.r)
    g[1:] = state.w[1:] ** 2 / grid.r[1:] ** 2
    return _int1d_range(g, grid, state.params.c_d, jt, grid.n)


def exterior_mass_trend(traj: Trajectory, times: np.ndarray) -> tuple[np.ndarray, float]:
    """Tail values at the given times and the fitted log-log exponent."""
    vals = np.asarray([exterior_mass_tail(traj.state_at(t)) for t in times])
    mask = vals > 0
    slope = float(np.polyfit(np.log(np.asarray(times)[mask]), np.log(vals[mask]), 1)[0])
    return vals, slope


def pointwise_bound_check(state: FieldState) -> tuple[float, float]:
    """The two scale-invariant pointwise ratios

        ratio1 = max_r r^{(d-2)/2} |u| / ||u||_{H^1-dot}
        ratio2 = max_r r^{2(d-1)/(p+3)} |u| /
                 (||u||_{H^1-dot}^{2/(p+3)} ||u||_{L^{p+1}}^{(p+1)/(p+3)})

    ratio1 is bounded by ((d-2) c_d)^{-1/2} (sharp by Cauchy-Schwarz on
    u = -integral of u_r)."""
    d, p = state.params.d, state.params.p
    cd = state.params.c_d
    grid = state.grid
    _, _, _, q = w_fields(state)
    h1_sq = _int1d(q ** 2, grid, cd)
    lp1_pow = _int1d(_pot_density(state), grid, cd)
    if h1_sq <= 0.0 or lp1_pow <= 0.0:
        raise ZeroFieldError("pointwise ratios are undefined for a zero state")
    h1 = math.sqrt(h1_sq)
    lp1 = lp1_pow ** (1.0 / (p + 1.0))

    r = grid.r
    # r^{(d-2)/2}|u| = |w| r^{-1/2}; r^{2(d-1)/(p+3)}|u| = |w| r^{-(d-1)(p-1)/(2(p+3))}
    m1 = float(np.max(np.abs(state.w[1:]) / np.sqrt(r[1:])))
    expo = (d - 1) * (p - 1) / (2.0 * (p + 3.0))
    m2 = float(np.max(np.abs(state.w[1:]) * r[1:] ** (-expo)))
    ratio1 = m1 / h1
    ratio2 = m2 / (h1 ** (2.0 / (p + 3.0)) * lp1 ** ((p + 1.0) / (p + 3.0)))
    return ratio1, ratio2

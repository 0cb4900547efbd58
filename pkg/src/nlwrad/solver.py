"""Characteristic-line evolution of the reduced 1D system.

A radial solution u of u_tt - Laplace(u) = -|u|^{p-1} u is carried by
w(r,t) = r^{(d-1)/2} u(r,t), which satisfies w_tt - w_rr = f with

    f(r,t) = -((d-1)(d-3)/4) r^{-2} w - r^{-(d-1)(p-1)/2} |w|^{p-1} w.

The characteristic variables v+ = w_t - w_r (rightgoing) and
v- = w_t + w_r (leftgoing) are advected exactly node-to-node because the
solver runs at unit CFL (dt = dr); all discretization error lives in the
Heun integration of f along the characteristic segments.  Boundary closure:
w(0,t) = 0 gives the reflection v+(0) = -v-(0); at r_max the inflow v- is
zero, valid as long as r_max exceeds the data support plus the run time.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .core import ModelParams, RadialGrid

__all__ = [
    "FieldState",
    "Trajectory",
    "NumericalAbortError",
    "SupportWarning",
    "init_from_profile",
    "init_outgoing",
    "step",
    "evolve",
    "reconstruct_u",
    "time_reflected",
    "w_fields",
    "support_radius",
    "state_distance_sq",
]


class NumericalAbortError(RuntimeError):
    """Evolution aborted: blow-up guard tripped or non-finite values appeared."""


class SupportWarning(UserWarning):
    """Grid too small for the zero-inflow boundary to be exact over the run."""


def _as_node_samples(func_or_array, grid: RadialGrid) -> np.ndarray:
    if callable(func_or_array):
        out = np.asarray([func_or_array(r) for r in grid.r], dtype=float)
    else:
        out = np.asarray(func_or_array, dtype=float).copy()
    if out.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} node samples, got shape {out.shape}")
    return out


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FieldState:
    """One time slice of (w, v+, v-).  Arrays are read-only; derived fields
    w_t = (v+ + v-)/2 and w_r = (v- - v+)/2 are exact by definition."""

    t: float
    w: np.ndarray
    v_plus: np.ndarray
    v_minus: np.ndarray
    params: ModelParams
    grid: RadialGrid

    def __post_init__(self):
        for name in ("w", "v_plus", "v_minus"):
            a = getattr(self, name)
            if a.shape != (self.grid.size,):
                raise ValueError(f"{name}: expected {self.grid.size} nodes, got {a.shape}")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} contains non-finite samples")
            object.__setattr__(self, name, _frozen(a))

    @property
    def w_t(self) -> np.ndarray:
        return 0.5 * (self.v_plus + self.v_minus)

    @property
    def w_r(self) -> np.ndarray:
        return 0.5 * (self.v_minus - self.v_plus)


def _centered_derivative(w: np.ndarray, dr: float) -> np.ndarray:
    dw = np.empty_like(w)
    dw[1:-1] = (w[2:] - w[:-2]) / (2.0 * dr)
    dw[0] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * dr)
    dw[-1] = (3.0 * w[-1] - 4.0 * w[-2] + w[-3]) / (2.0 * dr)
    return dw


def init_from_profile(u0, u1, grid: RadialGrid, params: ModelParams) -> FieldState:
    """State at t = 0 from radial data (u0, u1), given as callables of r or
    node-sample arrays.  w = r^{(d-1)/2} u0; v± = r^{(d-1)/2} u1 ∓ w_r with
    w_r from centered differences (one-sided at the ends)."""
    u0s = _as_node_samples(u0, grid)
    u1s = _as_node_samples(u1, grid)
    if not (np.all(np.isfinite(u0s)) and np.all(np.isfinite(u1s))):
        raise ValueError("initial data contain non-finite samples")
    rp = grid.r ** ((params.d - 1) / 2.0)
    w = rp * u0s
    w[0] = 0.0
    w_r = _centered_derivative(w, grid.dr)
    wt = rp * u1s
    return FieldState(t=0.0, w=w, v_plus=wt - w_r, v_minus=wt + w_r, params=params, grid=grid)


def init_outgoing(profile: Callable[[float], float], dprofile: Callable[[float], float],
                  grid: RadialGrid, params: ModelParams) -> FieldState:
    """Purely outgoing data in w-form: w = W(r), w_t = -W'(r), so that the
    free d=3 evolution is the exact translation w(r,t) = W(r-t).  W must
    vanish near the origin."""
    W = _as_node_samples(profile, grid)
    dW = _as_node_samples(dprofile, grid)
    W[0] = 0.0
    return FieldState(t=0.0, w=W, v_plus=-2.0 * dW, v_minus=np.zeros_like(W),
                      params=params, grid=grid)


def support_radius(state: FieldState, rel_tol: float = 1e-14) -> float:
    """Largest radius at which any field exceeds rel_tol times its max."""
    mag = np.abs(state.w) + np.abs(state.v_plus) + np.abs(state.v_minus)
    peak = mag.max()
    if peak == 0.0:
        return 0.0
    idx = np.nonzero(mag > rel_tol * peak)[0]
    return float(state.grid.r[idx[-1]])


def _kernel_arrays(state: FieldState):
    r = state.grid.r
    inv_r2 = np.zeros_like(r)
    inv_r2[1:] = r[1:] ** -2.0
    r_neg_gamma = np.zeros_like(r)
    r_neg_gamma[1:] = r[1:] ** (-state.params.source_exponent)
    return inv_r2, r_neg_gamma


def step(state: FieldState, mode: str = "nonlinear") -> FieldState:
    """One time step of size dt = dr."""
    traj = evolve(state, state.t + state.grid.dr, checkpoint_every=state.grid.dr, mode=mode,
                  check_support=False)
    return traj.states[-1]


@dataclass(eq=False)
class Trajectory:
    """Checkpointed evolution: states at strictly increasing times plus any
    per-checkpoint probe records and run metadata."""

    states: list[FieldState]
    records: dict[str, list] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.asarray([s.t for s in self.states])

    @property
    def t_end(self) -> float:
        return self.states[-1].t

    @property
    def checkpoint_spacing(self) -> float:
        ts = self.times
        return float(np.min(np.diff(ts))) if len(ts) > 1 else 0.0

    def state_at(self, t: float, tol: float | None = None) -> FieldState:
        """Checkpoint nearest to t; raises if none lies within tol
        (default: half the checkpoint spacing)."""
        ts = self.times
        i = int(np.argmin(np.abs(ts - t)))
        if tol is None:
            tol = 0.5 * self.checkpoint_spacing + 1e-12
        if abs(ts[i] - t) > tol:
            raise ValueError(f"no checkpoint within {tol:g} of t={t:g} "
                             f"(range [{ts[0]:g}, {ts[-1]:g}])")
        return self.states[i]

    def reflect(self) -> "Trajectory":
        """Time-reflected trajectory: if these states solve the equation with
        data (u0, u1), the reflected ones are u(., -t) for the data
        (u0, -u1) run, i.e. t -> -t, v+ -> -v-, v- -> -v+."""
        refl = [time_reflected(s) for s in reversed(self.states)]
        return Trajectory(states=refl, records={}, meta=dict(self.meta, reflected=True))

    def merged(self, other: "Trajectory") -> "Trajectory":
        """Union of checkpoints from two runs, sorted by time (duplicates at
        equal times keep self's copy)."""
        by_t: dict[float, FieldState] = {round(s.t, 9): s for s in other.states}
        by_t.update({round(s.t, 9): s for s in self.states})
        states = [by_t[k] for k in sorted(by_t)]
        return Trajectory(states=states, records={}, meta=dict(self.meta, merged=True))


def time_reflected(state: FieldState) -> FieldState:
    """The state of u(., -t) given the state at t of the (u0, -u1) run
    (and vice versa): w is kept, w_t flips sign, so v+ <-> -v-."""
    return FieldState(t=-state.t, w=state.w.copy(), v_plus=-state.v_minus.copy(),
                      v_minus=-state.v_plus.copy(), params=state.params, grid=state.grid)


def evolve(state: FieldState, t_end: float, checkpoint_every: float,
           mode: str = "nonlinear",
           probes: dict[str, Callable[[FieldState], object]] | None = None,
           check_support: bool = True) -> Trajectory:
    """Evolve to t_end, storing a checkpoint every checkpoint_every time units
    (snapped to whole steps).  mode is "nonlinear" (full equation) or
    "linear" (free wave: the |u|^{p-1} u term is dropped).

    Probes are callables evaluated on every checkpoint state; their values
    are collected in Trajectory.records[name].
    """
    if mode not in ("nonlinear", "linear"):
        raise ValueError(f"mode must be 'nonlinear' or 'linear', got {mode!r}")
    dt = state.grid.dr
    n_total = int(round((t_end - state.t) / dt))
    if n_total <= 0:
        raise ValueError(f"t_end={t_end} does not lie ahead of state.t={state.t}")
    per = max(1, int(round(checkpoint_every / dt)))

    if check_support:
        needed = support_radius(state) + (t_end - state.t) + 2 * dt
        if needed > state.grid.r_max:
            warnings.warn(
                f"r_max={state.grid.r_max:g} < support+T+2dr={needed:g}: "
                "zero-inflow boundary is not exact for this run",
                SupportWarning, stacklevel=2)

    w = state.w.copy()
    vp = state.v_plus.copy()
    vm = state.v_minus.copy()
    inv_r2, r_neg_gamma = _kernel_arrays(state)
    nonlinear = mode == "nonlinear"
    pot = state.params.potential_coeff
    p = state.params.p

    def checkpoint(k_steps: int) -> FieldState:
        return FieldState(t=state.t + k_steps * dt, w=w.copy(), v_plus=vp.copy(),
                          v_minus=vm.copy(), params=state.params, grid=state.grid)

    t_start = time.perf_counter()
    traj = Trajectory(states=[checkpoint(0)],
                      records={name: [] for name in (probes or {})},
                      meta={"dr": dt, "dt": dt, "scheme_order": 2, "mode": mode,
                            "kernel": kernels.KERNEL_NAME})
    for name, fn in (probes or {}).items():
        traj.records[name].append(fn(traj.states[0]))

    done = 0
    while done < n_total:
        chunk = min(per, n_total - done)
        status, k = kernels.run_steps(w, vp, vm, inv_r2, r_neg_gamma, pot, p, dt,
                                      nonlinear, chunk)
        if status != kernels.STATUS_OK:
            reason = "blow-up guard (max|w| > 1e12)" if status == kernels.STATUS_BLOWUP \
                else "non-finite field values"
            raise NumericalAbortError(
                f"{reason} at t={state.t + (done + k) * dt:g} (step {done + k})")
        done += chunk
        s = checkpoint(done)
        traj.states.append(s)
        for name, fn in (probes or {}).items():
            traj.records[name].append(fn(s))

    traj.meta["wall_time_s"] = time.perf_counter() - t_start
    return traj


def reconstruct_u(state: FieldState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(u, u_r, u_t) node samples from the w-form state.

    u = w r^{-(d-1)/2}; r^{(d-1)/2} u_r = w_r - (d-1) w/(2r);
    r^{(d-1)/2} u_t = w_t.  At r = 0, u and u_t come from quadratic
    extrapolation through the first three interior nodes, and u_r(0) = 0
    (smooth radial functions have no radial slope at the origin).
    """
    d = state.params.d
    r = state.grid.r
    rp = r ** ((d - 1) / 2.0)
    u = np.empty_like(state.w)
    u_t = np.empty_like(state.w)
    u_r = np.empty_like(state.w)
    w_t = state.w_t
    w_r = state.w_r
    u[1:] = state.w[1:] / rp[1:]
    u_t[1:] = w_t[1:] / rp[1:]
    u_r[1:] = (w_r[1:] - (d - 1) * state.w[1:] / (2.0 * r[1:])) / rp[1:]
    u[0] = 3.0 * u[1] - 3.0 * u[2] + u[3]
    u_t[0] = 3.0 * u_t[1] - 3.0 * u_t[2] + u_t[3]
    u_r[0] = 0.0
    return u, u_r, u_t


def w_fields(state: FieldState) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(w, w_t, w_r, q) with q = r^{(d-1)/2} u_r = w_r - (d-1) w / (2r).

    q carries the radial-gradient density without ever dividing by the
    vanishing factor r^{(d-1)/2}: |u_r|^2 r^{d-1} = q^2.
    """
    d = state.params.d
    r = state.grid.r
    w_r = state.w_r
    q = np.empty_like(w_r)
    q[1:] = w_r[1:] - (d - 1) * state.w[1:] / (2.0 * r[1:])
    q[0] = 0.0
    return state.w, state.w_t, w_r, q


def state_distance_sq(a: FieldState, b: FieldState) -> tuple[float, float]:
    """Squared H^1-dot and L^2 distances between two states on one grid:
    (c_d ∫ (q_a - q_b)^2 dr, c_d ∫ (w_t_a - w_t_b)^2 dr)."""
    if a.grid != b.grid or a.params.d != b.params.d:
        raise ValueError("states live on different grids or dimensions")
    _, wta, _, qa = w_fields(a)
    _, wtb, _, qb = w_fields(b)
    cd = a.params.c_d
    dr = a.grid.dr
    h1 = cd * float(np.trapezoid((qa - qb) ** 2, dx=dr))
    l2 = cd * float(np.trapezoid((wta - wtb) ** 2, dx=dr))
    return h1, l2

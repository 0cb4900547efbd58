# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled characteristic stepping kernel (the hot loop of the 1D solver).

Semantics are identical to nlwrad._step_kernels_py.run_steps; see that module
for the scheme description (explicit Heun for the nonlinear term, node-local
implicit trapezoid for the 1/r^2 potential).
"""

from libc.math cimport fabs, sqrt, pow, isfinite

import numpy as np


cdef inline double _abs_power(double a, int code, double pw) noexcept:
    if code == 1:
        return sqrt(a)
    elif code == 2:
        return a
    elif code == 3:
        return a * sqrt(a)
    elif code == 4:
        return a * a
    return pow(a, pw)


def run_steps(double[::1] w, double[::1] vp, double[::1] vm,
              double[::1] inv_r2, double[::1] r_neg_gamma,
              double pot_coeff, double p, double dt, bint nonlinear,
              long n_steps):
    """Advance (w, v+, v-) in place by n_steps characteristic steps.

    Returns (status, steps_done); status 0 = ok, 1 = blow-up guard tripped,
    2 = non-finite values detected.
    """
    cdef Py_ssize_t m = w.shape[0]
    cdef Py_ssize_t j
    cdef long k
    cdef double pw = p - 1.0
    cdef int code = 0
    if pw == 0.5:
        code = 1
    elif pw == 1.0:
        code = 2
    elif pw == 1.5:
        code = 3
    elif pw == 2.0:
        code = 4

    f_now_arr = np.empty(m)
    nl_pred_arr = np.zeros(m)
    wdot_arr = np.empty(m)
    cdef double[::1] f_now = f_now_arr
    cdef double[::1] nl_pred = nl_pred_arr
    cdef double[::1] wdot = wdot_arr

    cdef double half_dt = 0.5 * dt
    cdef double quarter_dt = 0.25 * dt
    cdef double a, ws, wn, s, wmax, ph

    for k in range(n_steps):
        for j in range(m):
            a = w[j]
            wdot[j] = 0.5 * (vp[j] + vm[j])
            f_now[j] = (-pot_coeff) * inv_r2[j] * a
            if nonlinear:
                f_now[j] -= r_neg_gamma[j] * _abs_power(fabs(a), code, pw) * a
                ws = a + dt * wdot[j]
                nl_pred[j] = (-r_neg_gamma[j]) * _abs_power(fabs(ws), code, pw) * ws

        # explicit transport: rightgoing sweep descends so vp[j-1] is still
        # the old value, leftgoing ascends so vm[j+1] is
        for j in range(m - 1, 0, -1):
            vp[j] = vp[j - 1] + half_dt * (f_now[j - 1] + nl_pred[j])
        for j in range(m - 1):
            vm[j] = vm[j + 1] + half_dt * (f_now[j + 1] + nl_pred[j])
        vm[m - 1] = 0.0

        # node-local implicit trapezoid for the 1/r^2 potential
        wmax = 0.0
        for j in range(1, m):
            ph = half_dt * pot_coeff * inv_r2[j]
            s = half_dt * ph
            if j == m - 1:
                wn = (w[j] + half_dt * wdot[j] + quarter_dt * vp[j]) / (1.0 + 0.5 * s)
                vp[j] -= ph * wn
            else:
                wn = (w[j] + half_dt * wdot[j] + quarter_dt * (vp[j] + vm[j])) / (1.0 + s)
                vp[j] -= ph * wn
                vm[j] -= ph * wn
            w[j] = wn
            a = fabs(wn)
            if a > wmax:
                wmax = a
        w[0] = 0.0
        vp[0] = -vm[0]

        if not isfinite(wmax):
            return 2, k + 1
        if wmax > 1e12:
            return 1, k + 1
    return 0, n_steps

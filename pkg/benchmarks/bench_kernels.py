#!/usr/bin/env python3
"""Benchmark the compiled stepping kernel against the numpy fallback.

Runs the same nonlinear evolution through both implementations and reports
steps/s, node-updates/s, the speedup, and the worst field deviation between
the two (they share the scheme but not the instruction order, so agreement
is expected at roundoff level).

    python benchmarks/bench_kernels.py [--nodes N] [--steps K] [--d D] [--p P]
"""

import argparse
import time

import numpy as np


def build_problem(n_nodes, d, p):
    dr = 1.0 / 256
    r = dr * np.arange(n_nodes)
    inv_r2 = np.zeros(n_nodes)
    inv_r2[1:] = r[1:] ** -2.0
    gamma = (d - 1) * (p - 1) / 2.0
    r_neg_gamma = np.zeros(n_nodes)
    r_neg_gamma[1:] = r[1:] ** -gamma
    u0 = np.exp(-((r - 0.25 * r[-1]) ** 2))
    w = r ** ((d - 1) / 2.0) * u0
    w[0] = 0.0
    w_r = np.gradient(w, dr)
    pot = (d - 1) * (d - 3) / 4.0
    return dict(w=w, vp=-w_r, vm=w_r, inv_r2=inv_r2, r_neg_gamma=r_neg_gamma,
                pot_coeff=pot, p=p, dt=dr)


def run(impl, prob, n_steps):
    w = prob["w"].copy()
    vp = prob["vp"].copy()
    vm = prob["vm"].copy()
    t0 = time.perf_counter()
    status, k = impl.run_steps(w, vp, vm, prob["inv_r2"], prob["r_neg_gamma"],
                               prob["pot_coeff"], prob["p"], prob["dt"], True, n_steps)
    elapsed = time.perf_counter() - t0
    assert status == 0 and k == n_steps
    return elapsed, (w, vp, vm)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=20000)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--p", type=float, default=2.8)
    args = ap.parse_args()

    from nlwrad import _step_kernels_py
    try:
        from nlwrad import _step_kernels
    except ImportError:
        _step_kernels = None

    prob = build_problem(args.nodes, args.d, args.p)
    updates = args.nodes * args.steps

    t_py, fields_py = run(_step_kernels_py, prob, args.steps)
    print(f"python   kernel: {t_py:8.3f} s  "
          f"({args.steps / t_py:9.1f} steps/s, {updates / t_py:.3g} node-updates/s)")

    if _step_kernels is None:
        print("compiled kernel: not built (pip install -e . with cython + a C compiler)")
        return

    t_cy, fields_cy = run(_step_kernels, prob, args.steps)
    print(f"compiled kernel: {t_cy:8.3f} s  "
          f"({args.steps / t_cy:9.1f} steps/s, {updates / t_cy:.3g} node-updates/s)")
    print(f"speedup: {t_py / t_cy:.1f}x")
    dev = max(float(np.max(np.abs(a - b))) for a, b in zip(fields_py, fields_cy))
    print(f"max field deviation: {dev:.3g}")


if __name__ == "__main__":
    main()

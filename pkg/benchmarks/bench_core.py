#!/usr/bin/env python3
"""Benchmark the compiled RK4 kernels against the pure-python fallback.

Both backends evaluate the same shifted-diagonal right-hand side; this
script times full RK4 propagation at a few space sizes and checks that the
final states agree.  Run from the repository root:

    python3 benchmarks/bench_core.py [--steps N] [--repeat R]
"""
import argparse
import time

import numpy as np

from holonome._core import _fallback
from holonome.fock import basis_state, standard_space
from holonome.holonomy import catalog, plan_pulse
from holonome.lindblad import NoiseParams, assemble_problem
from holonome.units import coupling_from_mhz_over_2pi

try:
    from holonome._core import _kernels
except ImportError:
    _kernels = None

G0 = coupling_from_mhz_over_2pi(2.0 * np.sqrt(2.0))
NOISE = NoiseParams(kappa1=0.3, kappa2=0.3, gamma_m=0.02, n_th=100.0)


def propagate(mod, problem, rho0, dt, steps):
    rho = rho0.copy()
    start = time.perf_counter()
    mod.rk4_propagate(
        rho, dt, steps,
        problem.local, problem.h_off, problem.h_w, problem.s_off, problem.s_fac,
    )
    return time.perf_counter() - start, rho


def bench(mech_dim, steps, repeat):
    space = standard_space(mech_dim=mech_dim)
    plan = plan_pulse(catalog("NOT"), G0)
    problem = assemble_problem(plan.couplings, NOISE, space)
    rho0 = basis_state(space, (1, 0, 0)).to_density_matrix()
    dt = plan.duration_tau / steps

    rows = {}
    for name, mod in (("cython", _kernels), ("python", _fallback)):
        if mod is None:
            continue
        best, rho = min(
            (propagate(mod, problem, rho0, dt, steps) for _ in range(repeat)),
            key=lambda pair: pair[0],
        )
        rows[name] = (best, rho)

    print(f"n = {space.dim:4d} (mech cutoff {mech_dim:2d}), {steps} RK4 steps:")
    for name, (secs, _) in rows.items():
        print(f"  {name:7s} {secs * 1e3:9.2f} ms  ({steps / secs:9.1f} steps/s)")
    if len(rows) == 2:
        speedup = rows["python"][0] / rows["cython"][0]
        dev = float(np.max(np.abs(rows["cython"][1] - rows["python"][1])))
        print(f"  speedup {speedup:5.2f}x, max |difference| = {dev:.3e}")
        if dev > 1e-12:
            raise SystemExit("backends diverged; investigate before trusting timings")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=250, help="RK4 steps per timing run")
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions (best kept)")
    args = parser.parse_args()

    if _kernels is None:
        print("compiled kernels unavailable; timing the fallback only")
    for mech_dim in (5, 10, 15, 25):
        bench(mech_dim, args.steps, args.repeat)


if __name__ == "__main__":
    main()

"""Benchmark the RK4 kernels: numba JIT vs pure-numpy fallback.

Runs the basic Toda flow at a few lattice sizes and reports wall time per
backend.  Usage:

    python benchmarks/benchmark_integrate.py [--steps 20000] [--sizes 3,6,9]
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from todavolterra import catalog, flows
from todavolterra._kernels import (
    HAS_NUMBA,
    rk4_integrate_numba,
    rk4_integrate_numpy,
)


def run_backend(kernel, cf, x0, h, steps):
    t0 = time.perf_counter()
    states, done = kernel(cf.coefs, cf.expts, cf.comp_ptr, x0, h, steps, steps)
    dt = time.perf_counter() - t0
    assert done == steps
    return dt, states[-1]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--sizes", default="3,6,9")
    parser.add_argument("--h", type=float, default=1e-3)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"RK4 benchmark: {args.steps} steps, h={args.h}")
    print(f"numba available: {HAS_NUMBA}")
    header = f"{'system':>12} {'dim':>4} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    rng = random.Random(0)
    for n in sizes:
        sys_id = catalog.SystemId("toda", "a", n)
        cf = flows.compile_field(catalog.flow(sys_id, 2))
        # positive a keeps the spectrum real and the trajectory bounded
        x0 = np.array(
            [
                rng.uniform(0.2, 0.8) if v.startswith("a") else rng.uniform(-0.5, 0.5)
                for v in cf.variables
            ]
        )
        if HAS_NUMBA:
            # trigger JIT compilation outside the timed region
            rk4_integrate_numba(cf.coefs, cf.expts, cf.comp_ptr, x0, args.h, 1, 1)
        t_np, end_np = run_backend(rk4_integrate_numpy, cf, x0, args.h, args.steps)
        if HAS_NUMBA:
            t_nb, end_nb = run_backend(rk4_integrate_numba, cf, x0, args.h, args.steps)
            if not np.allclose(end_np, end_nb, rtol=1e-10, atol=1e-12):
                raise AssertionError("backends disagree")
            print(f"{str(sys_id):>12} {cf.dim:>4} {t_np:>10.3f} {t_nb:>10.3f} {t_np / t_nb:>7.1f}x")
        else:
            print(f"{str(sys_id):>12} {cf.dim:>4} {t_np:>10.3f} {'-':>10} {'-':>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

#!/usr/bin/env python3
"""Time the numba and numpy backends of the Monte Carlo kernels.

Usage: python benchmarks/bench_kernels.py [--samples N] [--repeat K]
"""

import argparse
import time

import numpy as np

from qndsim import gaussian as g
from qndsim import kernels
from qndsim.conventions import db_to_r
from qndsim.protocol import parallel_gate, sequential_gate, standard_normals


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def random_plan(k, m, seed=0):
    """Feed-forward plan with the shape of the sequential gate (k outcomes, m outputs)."""
    rng = np.random.default_rng(seed)
    return dict(
        mu_q=rng.normal(size=k),
        L_q=np.tril(rng.normal(size=(k, k))),
        ff_meas=np.tril(rng.normal(size=(k, k)), -1),
        mu_o=rng.normal(size=m),
        K=rng.normal(size=(m, k)),
        L_o=np.tril(rng.normal(size=(m, m))),
        ff_out=rng.normal(size=(m, k)),
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if kernels.NUMBA_AVAILABLE else [])
    r = db_to_r(-4.0)
    x = standard_normals(0, args.samples, 4)
    z = standard_normals(1, args.samples, 8)
    plan = random_plan(4, 4)
    print(f"samples = {args.samples}, best of {args.repeat}")
    print(f"{'kernel':<28}" + "".join(f"{b:>12}" for b in backends))

    # warm up the jit so compile time is not counted
    for gate in (parallel_gate, sequential_gate):
        gate(g.vacuum(2), r, "montecarlo", samples=16, seed=0, backend=backends[-1])
    kernels.sample_moments(x[:16], backends[-1])
    kernels.feedforward_trajectories(z[:16, :4], z[:16, 4:], backend=backends[-1], **plan)

    rows = {
        "feedforward_trajectories": lambda b: kernels.feedforward_trajectories(z[:, :4], z[:, 4:], backend=b, **plan),
        "sample_moments": lambda b: kernels.sample_moments(x, b),
        "parallel gate (end to end)": lambda b: parallel_gate(
            g.vacuum(2), r, "montecarlo", samples=args.samples, seed=0, backend=b
        ),
        "sequential gate (end to end)": lambda b: sequential_gate(
            g.vacuum(2), r, "montecarlo", samples=args.samples, seed=0, backend=b
        ),
    }
    for name, fn in rows.items():
        cells = [best_of(lambda b=b: fn(b), args.repeat) for b in backends]
        print(f"{name:<28}" + "".join(f"{t * 1e3:>10.1f}ms" for t in cells))

    a = parallel_gate(g.vacuum(2), r, "montecarlo", samples=10_000, seed=1, backend="numpy").output_samples
    if "numba" in backends:
        b = parallel_gate(g.vacuum(2), r, "montecarlo", samples=10_000, seed=1, backend="numba").output_samples
        print(f"max |numba - numpy| on 10^4 trajectories: {np.abs(a - b).max():.1e}")


if __name__ == "__main__":
    main()

"""Benchmark the numba-jitted kernels against the pure-numpy fallback.

Times the three hot paths (field evaluation, edge-cost quadrature, segment
collision tests) on a density-scenario-sized workload for both backends and
prints a comparison table.

Run:  python benchmarks/benchmark_backends.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from crowdflow.kernels import get_kernels
from crowdflow.scenarios import concert_hall, density_scenario


def time_call(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def make_workload(seed=0, n_points=200_000, n_edges=30_000):
    rng = np.random.default_rng(seed)
    px = rng.uniform(0, 20, n_points)
    py = rng.uniform(0, 20, n_points)
    ax = rng.uniform(0, 20, n_edges)
    ay = rng.uniform(0, 20, n_edges)
    ang = rng.uniform(0, 2 * np.pi, n_edges)
    ln = rng.uniform(0.2, 1.2, n_edges)
    bx = ax + ln * np.cos(ang)
    by = ay + ln * np.sin(ang)
    return px, py, ax, ay, bx, by


def print_row(name, t_numpy, t_numba):
    speedup = t_numpy / t_numba if t_numba > 0 else float("inf")
    print(f"{name:28s}  numpy {t_numpy * 1e3:9.2f} ms   numba {t_numba * 1e3:9.2f} ms   "
          f"speedup {speedup:6.1f}x")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    px, py, ax, ay, bx, by = make_workload()
    field = density_scenario().flow.kernel_spec()
    hall = concert_hall()
    hall_field = hall.flow.kernel_spec()
    circles = hall.environment._circles
    rects = hall.environment._rects

    numpy_k = get_kernels("numpy")
    try:
        numba_k = get_kernels("numba")
    except ImportError:
        print("numba not importable; nothing to compare")
        return

    print(f"workload: {len(px):,} field points, {len(ax):,} edges, "
          f"{len(rects)} wall rectangles; best of {args.repeats}")

    cases = [
        ("field_samples (1 component)", lambda k: k.field_samples(field, px, py)),
        ("field_samples (8 components)", lambda k: k.field_samples(hall_field, px, py)),
        ("edge_costs (1 component)",
         lambda k: k.edge_costs(field, ax, ay, bx, by, 0.1, 2.0, 0.05)),
        ("edge_costs (8 components)",
         lambda k: k.edge_costs(hall_field, ax, ay, bx, by, 0.1, 2.0, 0.05)),
        ("segments_blocked",
         lambda k: k.segments_blocked(ax, ay, bx, by, circles, rects)),
        ("points_blocked",
         lambda k: k.points_blocked(px, py, circles, rects)),
    ]

    # warm up the JIT before timing
    for _, fn in cases:
        fn(numba_k)

    for name, fn in cases:
        t_np = time_call(fn, numpy_k, repeats=args.repeats)
        t_nb = time_call(fn, numba_k, repeats=args.repeats)
        print_row(name, t_np, t_nb)

    # agreement check on one representative kernel
    inv_np = numpy_k.edge_costs(hall_field, ax, ay, bx, by, 0.1, 2.0, 0.05)[0]
    inv_nb = numba_k.edge_costs(hall_field, ax, ay, bx, by, 0.1, 2.0, 0.05)[0]
    rel = np.max(np.abs(inv_np - inv_nb) / np.maximum(np.abs(inv_nb), 1e-12))
    print(f"max relative backend disagreement on edge costs: {rel:.3e}")


if __name__ == "__main__":
    main()

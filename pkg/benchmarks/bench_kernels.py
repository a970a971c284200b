#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--steps N]

Reports per-call times for the per-tick pose update, a lidar scan, and the
32x24 depth raster, plus the end-to-end environment step rate on each
backend. Both backends produce bit-identical results (tests/test_kernels.py);
this script shows what the extension buys in speed.
"""

import argparse
import time

import numpy as np

import rovergym._kernels as kernels

STEP_CONSTS = (0.02, 0.2, 0.25, 0.1, 0.45, 1.5, 2.0, 0.6, 0.02, 0.15, 0.02)


def bench(fn, n):
    fn()  # warm
    t0 = time.perf_counter()
    for _ in range(n):
        fn()
    return (time.perf_counter() - t0) / n


def bench_backend(impl, field, steps):
    rng = np.random.default_rng(0)
    pose = [1.0, 0.0, 0.1, 0.0, 0.0]
    joints = [0.0] * 4

    def one_step():
        out = impl.step_pose(field, 0.05, 0.0, -1.5, *pose, *joints,
                             0.8, 0.3, 0.2, -0.2, 0.1, 0.0, *STEP_CONSTS)
        if out[0]:
            pose[:] = [out[1], out[2], out[3], out[4], out[5]]
            joints[:] = out[10:14]
        else:
            pose[:] = [1.0, 0.0, 0.1, 0.0, 0.0]

    contact = impl.bilinear(field, 0.05, 0.0, -1.5, 2.0, 0.0)
    results = {
        "step_pose": bench(one_step, steps),
        "lidar_march": bench(
            lambda: impl.lidar_march(field, 0.05, 0.0, -1.5, 2.0, 0.0, 0.1,
                                     contact, 5.0, 0.02, 0.5), steps),
        "depth_raster": bench(
            lambda: impl.depth_raster(field, 0.05, 0.0, -1.5, 2.0, 0.0, 0.6,
                                      0.1, -0.35, 1.0472, 0.7854, 32, 24,
                                      5.0, 0.04), max(steps // 20, 5)),
    }
    return results


def bench_env(backend_name, n=2000):
    import importlib
    import os
    # a fresh interpreter would be cleaner; flipping the selected impl is
    # enough here because dynamics reads _kernels.impl at call time
    kernels.impl = kernels.get_impl(backend_name)
    import rovergym
    env = rovergym.make("lsd_force_lidar-v0", 0)
    env.reset()
    action = np.array([0.2, 0.1, -0.1, 0.0, 1.0, 0.05])

    def one():
        if env.step(action).done:
            env.reset()

    return bench(one, n)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=5000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    field = rng.uniform(0.0, 0.3, size=(60, 200))

    backends = ["pure"]
    try:
        kernels.get_impl("compiled")
        backends.append("compiled")
    except ImportError:
        print("compiled extension not built; benchmarking pure only")

    table = {}
    for name in backends:
        impl = kernels.get_impl(name)
        table[name] = bench_backend(impl, field, args.steps)
        table[name]["env_step"] = bench_env(name)

    kernels.impl = kernels.get_impl(backends[-1])

    ops = ["step_pose", "lidar_march", "depth_raster", "env_step"]
    header = f"{'op':<14}" + "".join(f"{b:>14}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for op in ops:
        row = f"{op:<14}"
        for b in backends:
            row += f"{table[b][op] * 1e6:>12.1f}us"
        if len(backends) == 2:
            row += f"{table['pure'][op] / table['compiled'][op]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()

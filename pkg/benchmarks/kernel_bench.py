"""Benchmark the compiled RK4 stepping kernel against the numpy fallback.

Runs the same sweep through both implementations, checks that the results are
bitwise identical, and reports per-step timings plus the speedup.  Sizes are
chosen to mimic real use: ``--dim`` is the reduced dimension r*m, ``--cols``
the number of simultaneously propagated columns (r*m for a fundamental-matrix
sweep, 1 for a particular solution).

Usage::

    python3 benchmarks/kernel_bench.py [--steps 2000] [--dim 8] [--cols 8]
"""

import argparse
import importlib.util
import time

import numpy as np

from bvpkit._kernel import _rk4_py


def build_inputs(steps: int, dim: int, cols: int, seed: int = 20240815):
    """A stable time-varying system x' = -K(t) x + g(t) on [0, 1]."""
    rng = np.random.default_rng(seed)
    h = 1.0 / steps
    base = rng.standard_normal((dim, dim)) * 0.3 + np.eye(dim)

    def k_at(t):
        return (1.0 + 0.5 * np.sin(2.0 * np.pi * t)) * base

    t_nodes = np.linspace(0.0, 1.0, steps + 1)
    t_half = t_nodes[:-1] + 0.5 * h
    k_nodes = np.stack([k_at(t) for t in t_nodes]).astype(np.complex128)
    k_half = np.stack([k_at(t) for t in t_half]).astype(np.complex128)
    g_nodes = np.ascontiguousarray(
        rng.standard_normal((steps + 1, dim, 1)), dtype=np.complex128)
    g_half = np.ascontiguousarray(
        0.5 * (g_nodes[:-1] + g_nodes[1:]))
    x0 = np.ascontiguousarray(np.eye(dim, cols), dtype=np.complex128)
    return k_nodes, g_nodes, k_half, g_half, x0, h


def time_sweep(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=2000)
    parser.add_argument("--dim", type=int, default=8)
    parser.add_argument("--cols", type=int, default=8)
    parser.add_argument("--repeats", type=int, default=7)
    opts = parser.parse_args()

    args = build_inputs(opts.steps, opts.dim, opts.cols)
    print(f"sweep: {opts.steps} steps, dim {opts.dim}, {opts.cols} columns")

    t_py = time_sweep(_rk4_py.rk4_sweep, args, opts.repeats)
    print(f"pure python : {t_py * 1e3:9.3f} ms  ({t_py / opts.steps * 1e6:8.3f} us/step)")

    if importlib.util.find_spec("bvpkit._kernel._rk4") is None:
        print("compiled    : not built (pip install rebuilds it; see README)")
        return

    from bvpkit._kernel import _rk4

    traj_c, bad_c = _rk4.rk4_sweep(*args)
    traj_py, bad_py = _rk4_py.rk4_sweep(*args)
    # dense matrices accumulate in different orders (BLAS vs plain loops),
    # so agreement is to roundoff, not bitwise
    dev = float(np.max(np.abs(traj_c - traj_py)))
    scale = float(np.max(np.abs(traj_py)))
    print(f"max deviation : {dev:.3e}  (relative {dev / scale:.3e}, "
          f"{'ok' if dev <= 1e-12 * scale else 'SUSPECT'})")
    assert bad_c == bad_py

    t_c = time_sweep(_rk4.rk4_sweep, args, opts.repeats)
    print(f"compiled    : {t_c * 1e3:9.3f} ms  ({t_c / opts.steps * 1e6:8.3f} us/step)")
    print(f"speedup     : {t_py / t_c:9.2f}x")


if __name__ == "__main__":
    main()

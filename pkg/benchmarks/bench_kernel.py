"""Benchmark the compiled local-move kernel against the pure-Python fallback.

Both backends must produce bit-identical module assignments; this script
checks that while timing full passes-to-convergence runs on planted-partition
graphs of growing size.

Usage: python benchmarks/bench_kernel.py [--sizes 200,500,1000] [--rng-seed 7]
"""

import argparse
import sys
import time

import numpy as np

from crosscomm import mapeq
from crosscomm.experiments import planted_partition
from crosscomm.mapeq import _kernel_py

try:
    from crosscomm.mapeq import _kernel as _kernel_c
except ImportError:
    _kernel_c = None


def run_backend(kernel, arr, order):
    modules = np.arange(arr.n, dtype=np.int64)
    t0 = time.perf_counter()
    moves = kernel.local_moves(arr.p, arr.out_ptr, arr.out_idx, arr.out_flow,
                               arr.in_ptr, arr.in_idx, arr.in_flow,
                               modules, order, 1_000_000, mapeq.MOVE_EPS)
    return time.perf_counter() - t0, moves, modules


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,500,1000")
    parser.add_argument("--rng-seed", type=int, default=7)
    args = parser.parse_args(argv)

    if _kernel_c is None:
        print("compiled kernel not built; nothing to compare", file=sys.stderr)
        return 1

    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"{'n':>6} {'arcs':>8} {'python':>10} {'compiled':>10} {'speedup':>8}  identical")
    for n in sizes:
        blocks = max(2, n // 100)
        g = planted_partition(blocks=blocks, block_size=n // blocks,
                              p_in=0.1, p_out=0.005, rng_seed=args.rng_seed)
        arr = mapeq.flow_arrays(g)
        order = np.random.default_rng(args.rng_seed).permutation(arr.n).astype(np.int64)

        t_py, moves_py, mods_py = run_backend(_kernel_py, arr, order)
        t_c, moves_c, mods_c = run_backend(_kernel_c, arr, order)
        same = moves_py == moves_c and np.array_equal(mods_py, mods_c)
        print(f"{arr.n:>6} {len(arr.flow):>8} {t_py:>9.3f}s {t_c:>9.3f}s "
              f"{t_py / t_c:>7.1f}x  {same}")
        if not same:
            print("backends diverged!", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

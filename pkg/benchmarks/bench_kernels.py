"""Compiled vs pure-Python kernel timing on random members.

Run as a script:

    python benchmarks/bench_kernels.py [--sizes 10,14,18] [--reps 5] [--seed 7]

Builds random class members at each size, then times delta_table and
scan_min on the full subset lattice under both backends.  The extension
module is the default import; the pure path is forced explicitly, so one
process can time both.
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from trigeom import _kernel_py
from trigeom import kernels
from trigeom.generate import random_member
from trigeom.masks import context_for


def _time(fn, reps):
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples), statistics.median(samples)


def bench(sizes, reps, seed):
    rng = random.Random(seed)
    compiled = kernels._impl if kernels.BACKEND == "cython" else None
    rows = []
    for size in sizes:
        g = random_member(rng, size)
        ctx = context_for(g)
        free = list(range(len(g.ids)))[1:]
        base = 1  # vertex at position 0
        amb = ctx.full_mask

        def run(impl):
            impl.delta_table(ctx, base, free)
            impl.scan_min(ctx, base, free, amb, True, len(free))

        py_best, py_med = _time(lambda: run(_kernel_py), reps)
        row = {"size": len(g.ids), "pure_best": py_best, "pure_median": py_med}
        if compiled is not None:
            c_best, c_med = _time(lambda: run(compiled), reps)
            row.update(
                compiled_best=c_best,
                compiled_median=c_med,
                speedup=py_best / c_best if c_best else float("inf"),
            )
        rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="10,14,18")
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"default backend: {kernels.BACKEND}")
    for row in bench(sizes, args.reps, args.seed):
        parts = [f"size {row['size']:3d}", f"pure {row['pure_best'] * 1e3:9.2f} ms"]
        if "compiled_best" in row:
            parts.append(f"compiled {row['compiled_best'] * 1e3:9.2f} ms")
            parts.append(f"speedup {row['speedup']:6.1f}x")
        print("  ".join(parts))


if __name__ == "__main__":
    main()

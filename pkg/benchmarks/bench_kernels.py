"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py --radius 11 --repeat 3
"""

import argparse
import time

import numpy as np

from closedgeo import kernels
from closedgeo.enumerator import _generator_rows
from closedgeo.surface import bolza


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=float, default=11.0, help="ball radius for the BFS")
    ap.add_argument("--walks", type=int, default=500, help="number of cutting sequences")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    compiled = kernels.compiled_backend()
    backends = [("python", kernels.python_backend)]
    if compiled is not None:
        backends.insert(0, ("cython", compiled))
    else:
        print("compiled extension not built; timing the fallback only")

    gens = _generator_rows(bolza())
    mats, _, _ = kernels.ball_bfs(gens, args.radius, 10**8)
    t = np.abs(mats[:, 0] + mats[:, 3])
    hyp = mats[t > 2.0 + 1e-9]
    walk_rows = hyp[:args.walks]
    lengths = 2.0 * np.arccosh(np.abs(walk_rows[:, 0] + walk_rows[:, 3]) / 2.0)

    results = {}
    for name, mod in backends:
        tb, out = best_of(lambda: mod.ball_bfs(gens, args.radius, 10**8), args.repeat)
        tc, _ = best_of(lambda: mod.crossing_mask(hyp), args.repeat)
        tw, _ = best_of(lambda: [mod.cutting_sequence(*m, l) for m, l in zip(walk_rows, lengths)],
                        args.repeat)
        results[name] = (tb, tc, tw)
        print(f"{name:7s} ball_bfs {len(out[0]):8d} elements {tb:8.3f} s | "
              f"crossing_mask {len(hyp):8d} rows {tc:8.3f} s | "
              f"cutting_sequence {len(walk_rows):5d} walks {tw:8.3f} s")
    if len(results) == 2:
        c, p = results["cython"], results["python"]
        print("speedup  " + "  ".join(f"{k} x{pp / cc:.1f}" for k, cc, pp in
                                      zip(("ball_bfs", "crossing_mask", "cutting_sequence"), c, p)))


if __name__ == "__main__":
    main()

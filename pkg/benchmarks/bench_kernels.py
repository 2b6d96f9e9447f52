"""Compare the compiled kernels with the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Also times one full second-stage fit so the kernel share of a run is visible.
"""
import argparse
import timeit

import numpy as np

from fractv import _kernels_py
from fractv.graph import build_knn_graph
from fractv.pipeline import Workspace, add_noise, first_stage, second_stage
from fractv.synth import random_coordinates, synthesize

try:
    from fractv import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = {"python": _kernels_py}
    if _kernels_c is not None:
        backends["cython"] = _kernels_c
    else:
        print("compiled extension not built; timing the fallback only")

    print(f"{'kernel':<28}{'size':>12}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for n in (50, 500, 2000):
        c = random_coordinates(n, rng)
        times = [best_of(lambda m=m: m.haversine_matrix(c[:, 0], c[:, 1]), args.repeat) for m in backends.values()]
        row(f"haversine_matrix", f"N={n}", times)
    for n, t in ((50, 6), (50, 120), (500, 120)):
        g = build_knn_graph(random_coordinates(n, rng), 5)
        indptr, indices = g.csr()
        Y = rng.standard_normal((n, t))
        times = [best_of(lambda m=m: m.median_pass(Y, indptr, indices, True), args.repeat)
                 for m in backends.values()]
        row("median_pass", f"{n}x{t}", times)

    _, g, X = synthesize(50, 120, 20, seed=0)
    Y = add_noise(X, -2.0, 1)
    ws = Workspace(g, 6)
    ws.shifts(1.0, 1.0)
    X1 = first_stage(Y, ws, "median")
    t_first = best_of(lambda: first_stage(Y, ws, "median"), args.repeat)
    t_second = best_of(lambda: second_stage(Y, X1, ws, (1.0, 1.0), 5, 42), args.repeat)
    print(f"\nmedian first stage (50x120, active backend): {t_first * 1e3:8.2f} ms")
    print(f"second stage at one order pair (P=5, Q=42):  {t_second * 1e3:8.2f} ms")


def row(name, size, times):
    speed = f"{times[0] / times[-1]:9.1f}x" if len(times) > 1 else ""
    print(f"{name:<28}{size:>12}" + "".join(f"{t * 1e3:10.3f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()

"""Time the compiled and numpy kernel backends on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--n 200]

Also checks that both backends return bit-identical results before timing them, and
times the full detectors, which are dominated by LAPACK and not by either backend.
"""
import argparse
import time

import numpy as np

from qlump import kernels
from qlump._random import substream
from qlump.clustering import kmeans_plus_plus
from qlump.generators import make_instance
from qlump.markov import stationary_distribution
from qlump.methods import detect_general, detect_metastable, random_partition


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def cases(n):
    rng = substream(0, 0)
    x = rng.standard_normal((n, 10))
    centers = kmeans_plus_plus(x, 5, rng)
    inst = make_instance("blockstoch", n, 0.3, 1, m=4)
    v = stationary_distribution(inst.matrix).weights
    start = random_partition(n, 4, substream(1, 0)).labels
    return {
        "lloyd (k=5, d=10)": lambda impl: impl.lloyd(x, centers, 300),
        "block_sums (k=4)": lambda impl: impl.block_sums(inst.matrix.entries, start, 4),
        "iterate_lumping (k=4)": lambda impl: impl.iterate_lumping(inst.matrix.entries, v, start, 4, 200),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.tobytes() == b.tobytes()
    return a == b


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--n", type=int, default=200)
    args = parser.parse_args()
    impls = kernels.implementations()
    print(f"active backend: {kernels.BACKEND}; available: {', '.join(impls)}")
    names = list(impls)
    print(f"{'kernel':26s}" + "".join(f"{name + ' ms':>12s}" for name in names) + f"{'speedup':>10s}  identical")
    for label, fn in cases(args.n).items():
        results = {name: fn(impl) for name, impl in impls.items()}
        ms = {name: 1e3 * best_of(lambda i=impl: fn(i), args.repeat) for name, impl in impls.items()}
        speed = ms["python"] / ms["cython"] if "cython" in ms else float("nan")
        ident = all(same(results[names[0]], results[n]) for n in names[1:])
        print(f"{label:26s}" + "".join(f"{ms[n]:12.3f}" for n in names) + f"{speed:10.1f}  {ident}")

    inst = make_instance("blockstoch", args.n, 0.3, 2, m=3)
    print(f"\nfull detectors at n={args.n} (active backend):")
    for label, fn in (("q-metastable", lambda: detect_metastable(inst.matrix, 3)),
                      ("q-general", lambda: detect_general(inst.matrix, 3))):
        print(f"  {label:14s}{1e3 * best_of(fn, max(1, args.repeat // 2)):10.1f} ms")


if __name__ == "__main__":
    main()

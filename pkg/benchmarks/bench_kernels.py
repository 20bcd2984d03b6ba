"""Compare the compiled and numpy backends.

    python benchmarks/bench_kernels.py [--repeat 200]

Times a single loss/gradient evaluation for both ansatzes at d = 2..5 and a
complete multistart search, and reports the speedup of the compiled kernels.
"""

import argparse
import time
import timeit

import numpy as np

from mufpairs import kernels
from mufpairs.search import SearchConfig, multistart_search


def time_eval(backend, kind, d, repeat):
    fn = getattr(kernels.get_backend(backend), f"{kind}_loss_grad")
    size = 4 * d**3 if kind == "general" else 4 * d
    x = np.random.default_rng(0).standard_normal(size)
    fn(x, d, 0.1)
    return timeit.timeit(lambda: fn(x, d, 0.1), number=repeat) / repeat


def time_search(backend, cfg):
    previous = kernels.set_backend(backend)
    try:
        start = time.perf_counter()
        res = multistart_search(cfg, workers=1)
        return time.perf_counter() - start, res.best_loss
    finally:
        kernels.set_backend(previous)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()
    names = sorted(kernels.BACKENDS)
    if "cython" not in names:
        print("compiled backend not built; only the numpy backend is available")
    print(f"{'kernel':<12}{'d':>3}" + "".join(f"{n + ' [us]':>16}" for n in names) + f"{'speedup':>10}")
    for kind in ("general", "covariant"):
        for d in (2, 3, 4, 5):
            times = {n: time_eval(n, kind, d, args.repeat) for n in names}
            row = f"{kind:<12}{d:>3}" + "".join(f"{times[n] * 1e6:>16.1f}" for n in names)
            if "cython" in times:
                row += f"{times['python'] / times['cython']:>9.1f}x"
            print(row)
    print()
    for cfg in (SearchConfig(3, 0.2, restarts=1, master_seed=1), SearchConfig(4, 0.1, restarts=10, master_seed=1)):
        results = {n: time_search(n, cfg) for n in names}
        desc = f"search d={cfg.d} t={cfg.t} restarts={cfg.restarts}"
        print(desc + "".join(f"  {n}: {t:.3f}s (loss {loss:.2e})" for n, (t, loss) in results.items()))


if __name__ == "__main__":
    main()

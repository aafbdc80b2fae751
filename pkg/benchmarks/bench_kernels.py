"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from epp import _backend, _kernels_py
from epp.synth import make_rng


def workloads(rng):
    # one benchmark-sized tournament: 44 players x 20 splits, cross-split
    sizes = np.full(44, 20)
    segs = [np.sort(rng.random(20)) for _ in sizes]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    scores = np.concatenate(segs)
    matrix = rng.random((44, 20))

    n_players = 44
    ii, jj = np.triu_indices(n_players, k=1)
    succ = rng.integers(0, 400, len(ii)).astype(float)
    fail = 400.0 - succ
    beta = rng.normal(size=n_players)

    n_games = 1_000_000
    ei = rng.integers(0, 20, n_games)
    ej = (ei + rng.integers(1, 20, n_games)) % 20
    actual = rng.integers(0, 3, n_games) / 2.0

    return {
        "cross_split_counts (44x20, 946 pairs)": lambda k: k.cross_split_counts(scores, offsets),
        "same_split_counts (44x20)": lambda k: k.same_split_counts(matrix),
        "bt_derivatives (44 players, 946 rows)": lambda k: k.bt_derivatives(beta, ii, jj, succ, fail),
        "elo_sequential (1e6 games)": lambda k: k.elo_sequential(
            np.full(20, 1500.0), np.zeros(20, dtype=np.int64), ei, ej, actual, 32.0, 400.0, 10.0
        ),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = {"python": _kernels_py}
    if _backend._compiled is not None:
        backends["cython"] = _backend._compiled
    else:
        print("compiled kernels not built; timing the fallback only")

    print(f"{'kernel':<42}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for name, fn in workloads(make_rng(0)).items():
        t = {b: best_of(lambda: fn(k), args.repeat) for b, k in backends.items()}
        speedup = f"{t['python'] / t['cython']:>9.1f}x" if "cython" in t else ""
        print(f"{name:<42}" + "".join(f"{t[b] * 1e3:>10.2f}ms" for b in backends) + speedup)


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the EM and fold-in kernels: numba @njit vs pure numpy.

Usage: python benchmarks/bench_em.py [--docs N] [--words M] [--topics K]

The same comparison can be forced package-wide by setting
PHOTOTOPICS_DISABLE_NUMBA=1 before importing phototopics.
"""

import argparse
import time

import numpy as np

from phototopics import _kernels


def synth_corpus(rng, n_docs, n_words, density=0.05):
    dense = rng.random((n_words, n_docs)) < density
    rows, cols = np.nonzero(dense)
    vals = np.ones(len(rows))
    return rows.astype(np.int64), cols.astype(np.int64), vals


def bench(fn, args, repeats):
    fn(*args)  # warmup (JIT compile for the numba path)
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--docs", type=int, default=5000)
    parser.add_argument("--words", type=int, default=2000)
    parser.add_argument("--topics", type=int, default=8)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    rows, cols, vals = synth_corpus(rng, args.docs, args.words)
    pwz = rng.random((args.topics, args.words)) + 1e-3
    pwz /= pwz.sum(axis=1, keepdims=True)
    pzd = np.full((args.docs, args.topics), 1.0 / args.topics)
    print(f"corpus: {args.docs} docs, {args.words} words, "
          f"{len(vals)} nonzeros, K={args.topics}")

    em_args = (rows, cols, vals, pwz, pzd)
    t_np = bench(_kernels.em_sufficient_stats_numpy, em_args, args.repeats)
    print(f"em_sufficient_stats  numpy: {t_np * 1e3:8.2f} ms")
    if _kernels.HAS_NUMBA:
        t_nb = bench(_kernels.em_sufficient_stats_numba, em_args, args.repeats)
        print(f"em_sufficient_stats  numba: {t_nb * 1e3:8.2f} ms "
              f"({t_np / t_nb:.1f}x)")
    else:
        print("numba path unavailable (disabled or not installed)")

    widx = np.arange(0, args.words, 7, dtype=np.int64)
    wvals = np.ones(len(widx))
    fi_args = (widx, wvals, pwz, 200, 1e-10)
    t_np = bench(_kernels.fold_in_numpy, fi_args, args.repeats)
    print(f"fold_in              numpy: {t_np * 1e3:8.2f} ms")
    if _kernels.HAS_NUMBA:
        t_nb = bench(_kernels.fold_in_numba, fi_args, args.repeats)
        print(f"fold_in              numba: {t_nb * 1e3:8.2f} ms "
              f"({t_np / t_nb:.1f}x)")


if __name__ == "__main__":
    main()

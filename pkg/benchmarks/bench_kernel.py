"""Compare the compiled and numpy decode kernels.

    python benchmarks/bench_kernel.py [--pairs 20000] [--candidates 41] [--repeat 5]

Also times a full lambda sweep (19 phi x 25 lambda cells) with each backend.
"""

import argparse
import time
from unittest import mock

import numpy as np

from mosajscc import kernel
from mosajscc.experiments import SweepSpec, sweep_lambda


def problem(n_pairs, n_cand, seed=0):
    rng = np.random.default_rng(seed)
    levels = np.linspace(1.0, 5.0, n_cand)
    gain = 0.5 * 155e-6 * (levels - 0.74) ** 2
    lam = np.full(n_cand, 0.037)
    true = rng.integers(0, n_cand, n_pairs)
    vds = rng.uniform(4.5, 9.9, n_pairs)
    i1 = gain[true] * (1 + lam[true] * vds)
    i2 = gain[true] * (1 + lam[true] * (vds + 0.1))
    return gain, lam, i1, i2


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=20000)
    ap.add_argument("--candidates", type=int, default=41)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = {"python": kernel.decode_batch_py}
    if kernel.decode_batch_c is not None:
        backends["cython"] = kernel.decode_batch_c
    else:
        print("compiled kernel not available; timing numpy only")

    args_ = problem(args.pairs, args.candidates)
    print(f"decode_batch: {args.pairs} pairs x {args.candidates} candidates, best of {args.repeat}")
    ref = None
    for name, fn in backends.items():
        for correct in (False, True):
            t = best_of(lambda: fn(*args_, 4.5, 10.0, 1e-9, correct), args.repeat)
            print(f"  {name:7s} correction={'on ' if correct else 'off'} {t * 1e3:9.2f} ms")
        out = fn(*args_, 4.5, 10.0, 1e-9, True)
        if ref is None:
            ref = out
        else:
            same = all(np.array_equal(np.asarray(a), np.asarray(b)) for a, b in zip(ref, out))
            print(f"  outputs identical to numpy: {same}")

    print("full lambda sweep (475 cells)")
    for name, fn in backends.items():
        with mock.patch.object(kernel, "decode_batch", fn):
            t = best_of(lambda: sweep_lambda(SweepSpec()), 1)
        print(f"  {name:7s} {t:6.2f} s")


if __name__ == "__main__":
    main()

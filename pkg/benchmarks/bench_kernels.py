"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both twins are called directly, so FNORM_BACKEND does not matter here.
Each row also reports the max absolute difference between the two outputs.
"""

import argparse
import time

import numpy as np

from fnorm import _accel


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(rng):
    X = rng.exponential(size=(200_000, 2))
    P = rng.uniform(0, 2, size=(64, 3))
    yield "mean_max 2e5 x 64", (lambda: _accel.mean_max_numba(X, P)[0]), (lambda: _accel.mean_max_numpy(X, P)[0])

    A = rng.uniform(size=(4000, 2))
    B = rng.uniform(size=(4000, 2))
    for name, code in _accel.METRIC_CODES.items():
        yield (
            f"hausdorff 4000^2 {name}",
            (lambda c=code: _accel.directed_hausdorff_numba(A, B, c)),
            (lambda c=code: _accel.directed_hausdorff_numpy(A, B, c)),
        )

    m, nu = 2**14, 4096
    Z = rng.standard_normal((256, m))
    u = np.linspace(0.0, 1.0, nu)
    pos = u * m
    bidx = np.minimum(np.floor(pos).astype(np.int64), m - 1)
    bfrac = pos - bidx
    qidx = np.array([2047, 2866], dtype=np.int64)
    qfrac = np.array([0.5, 0.2])
    qscale = np.ones(2)
    args = (Z, u, bidx, bfrac, qidx, qfrac, qscale)
    yield "bridge 256 paths", (lambda: _accel.bridge_integrals_numba(*args)), (lambda: _accel.bridge_integrals_numpy(*args))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not _accel.NUMBA_AVAILABLE:
        print("numba is not installed; nothing to compare")
        return

    print(f"{'kernel':<26}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, fast, slow in cases(np.random.default_rng(args.seed)):
        fast()  # compile
        t_fast, a = best_of(fast, args.repeat)
        t_slow, b = best_of(slow, args.repeat)
        diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        print(f"{name:<26}{t_fast:>12.4f}{t_slow:>12.4f}{t_slow / t_fast:>9.1f}x{diff:>14.2e}")


if __name__ == "__main__":
    main()

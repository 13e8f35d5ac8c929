"""Compare the compiled kernels against the pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py [--quick]

Both backends compute identical results (same op order, same RNG streams);
this script only measures the speed gap and double-checks equality on the
benchmarked inputs.
"""

import argparse
import time

import numpy as np

from matwalk._kernels import backend, pure


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller problem sizes")
    args = ap.parse_args()

    if not backend.IS_COMPILED:
        print("compiled backend unavailable; nothing to compare")
        return

    scale = 0.1 if args.quick else 1.0
    n_prod = int(200_000 * scale)
    n_exc = int(20_000 * scale)
    n_seq = max(int(20 * scale), 2)

    rng = np.random.default_rng(0)
    theta = np.empty(n_prod + 1)
    theta[:] = 0.5 * (1.0 + 0.1 * np.sin(np.arange(n_prod + 1)))

    rows = []

    tc, rc = timeit(backend.prod21_log_e1, theta, 1, n_prod)
    tp, rp = timeit(pure.prod21_log_e1, theta, 1, n_prod, repeat=1)
    assert np.array_equal(rc[1:], rp[1:])
    rows.append(("prod21_log_e1", f"n={n_prod}", tc, tp))

    tc, rc = timeit(backend.prod12_log_rows, theta, n_prod)
    tp, rp = timeit(pure.prod12_log_rows, theta, n_prod, repeat=1)
    assert np.array_equal(rc[0][2:], rp[0][2:])
    rows.append(("prod12_log_rows", f"anchor={n_prod}", tc, tp))

    up = np.full(10_001, 2.0 / 3.0)
    tc, rc = timeit(backend.simulate_excursions, up, 1, 2, n_exc, 42, 0, 10_000, 10_000)
    tp, rp = timeit(pure.simulate_excursions, up, 1, 2, n_exc, 42, 0, 10_000, 10_000, repeat=1)
    assert np.array_equal(rc[0], rp[0])
    rows.append(("simulate_excursions", f"{n_exc} excursions", tc, tp))

    a = 1.0 + 0.3 / np.maximum(np.arange(201.0), 1.0) ** 2
    b = np.full(201, 0.8)
    d = 1.0 - 0.2 / np.maximum(np.arange(201.0), 1.0) ** 2

    def scan_many(mod, reps):
        last = None
        for _ in range(reps):
            last = mod.sandwich_scan(a, b, d)
        return last

    tc, rc = timeit(scan_many, backend, n_seq)
    tp, rp = timeit(scan_many, pure, max(n_seq // 10, 1), repeat=1)
    tp *= n_seq / max(n_seq // 10, 1)
    assert rc == rp
    rows.append(("sandwich_scan", f"k=200 x {n_seq} seqs", tc, tp))

    print(f"{'kernel':<22}{'size':<22}{'compiled':>12}{'pure':>12}{'speedup':>10}")
    for name, size, tc, tp in rows:
        print(f"{name:<22}{size:<22}{tc:>11.4f}s{tp:>11.3f}s{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()

"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run:  python3 benchmarks/bench_kernels.py

Both implementations are imported directly (the DECOYBB84_NO_NUMBA flag
only changes which one the library dispatches to), so one process can time
the two paths side by side.  The first numba call pays JIT compilation and
is excluded by the warmup pass.
"""

import time

import numpy as np

from decoybb84 import kernels


def benchmark(func, *args, n_warmup=1, n_iter=5):
    for _ in range(n_warmup):
        func(*args)
    start = time.perf_counter()
    for _ in range(n_iter):
        func(*args)
    return (time.perf_counter() - start) / n_iter * 1000  # ms


def main():
    if not kernels.HAVE_NUMBA:
        print("numba not importable; only the numpy path is available")
        return

    rng = np.random.default_rng(0)
    print(f"active backend: {kernels.BACKEND}")
    print("=" * 64)

    print("\ndecode_table: nearest codeword for every word of F_2^n")
    for n_bits, code_size in ((10, 256), (12, 1024), (14, 2048)):
        code = np.unique(rng.integers(0, 1 << n_bits, size=code_size,
                                      dtype=np.uint64))
        t_np = benchmark(kernels.decode_table_numpy, code, n_bits)
        t_nb = benchmark(kernels.decode_table_numba, code, n_bits)
        assert np.array_equal(kernels.decode_table_numpy(code, n_bits),
                              kernels.decode_table_numba(code, n_bits))
        print(f"  n={n_bits:2d} |code|={len(code):5d}   "
              f"numpy {t_np:9.2f} ms   numba {t_nb:9.2f} ms   "
              f"({t_np / t_nb:5.1f}x)")

    print("\ntoeplitz_image_counts: membership counts over all seeds")
    for l, m in ((6, 6), (8, 7), (10, 8)):
        t_np = benchmark(kernels.toeplitz_image_counts_numpy, l, m)
        t_nb = benchmark(kernels.toeplitz_image_counts_numba, l, m)
        assert np.array_equal(kernels.toeplitz_image_counts_numpy(l, m),
                              kernels.toeplitz_image_counts_numba(l, m))
        print(f"  l={l:2d} m={m:2d} seeds=2^{l + m - 1:2d}   "
              f"numpy {t_np:9.2f} ms   numba {t_nb:9.2f} ms   "
              f"({t_np / t_nb:5.1f}x)")

    print("\nrestricted_decode_flags: masked minimum-weight decoding")
    for n_bits, n_cands, n_ys in ((10, 256, 2048), (12, 1024, 4096)):
        cands = np.unique(rng.integers(0, 1 << n_bits, size=n_cands,
                                       dtype=np.uint64))
        good = rng.integers(0, 2, size=len(cands)).astype(np.uint8)
        ys = rng.integers(0, 1 << n_bits, size=n_ys, dtype=np.uint64)
        mask = (1 << (n_bits - 2)) - 1
        t_np = benchmark(kernels.restricted_decode_flags_numpy,
                         cands, good, mask, ys)
        t_nb = benchmark(kernels.restricted_decode_flags_numba,
                         cands, good, mask, ys)
        print(f"  n={n_bits:2d} cands={len(cands):5d} ys={n_ys:5d}   "
              f"numpy {t_np:9.2f} ms   numba {t_nb:9.2f} ms   "
              f"({t_np / t_nb:5.1f}x)")


if __name__ == "__main__":
    main()

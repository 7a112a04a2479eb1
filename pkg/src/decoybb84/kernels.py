"""Hot enumeration kernels: numba-jitted loops with a pure-numpy fallback.

The exhaustive loops that dominate runtime live here: Hamming-distance
decode tables, Toeplitz image counting over all seeds, and the restricted
minimum-weight scans of the decoding-error verifier.  Each kernel has two
implementations:

* ``*_numba``, an ``@njit`` loop (compiled lazily on first call),
* ``*_numpy``, a vectorized fallback with identical results.

The active backend is numba when importable, unless the environment
variable ``DECOYBB84_NO_NUMBA=1`` is set, in which case the numpy path is
used.  Both paths stay importable so the parity tests and
``benchmarks/bench_kernels.py`` can compare them directly.

All codeword arrays passed in must already be sorted by lexicographic key
(coordinate 0 most significant); "first index wins" then implements the
package-wide lexicographic tie-break.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("DECOYBB84_NO_NUMBA", "") != "1"

# 16-bit popcount lookup shared by both backends.
_POP16 = (
    (np.arange(1 << 16, dtype=np.uint32)[:, None] >> np.arange(16, dtype=np.uint32)[None, :]) & 1
).sum(axis=1).astype(np.uint8)

_U16 = np.uint64(16)
_U32 = np.uint64(32)
_U48 = np.uint64(48)
_MASK16 = np.uint64(0xFFFF)


def popcount64_numpy(x: np.ndarray) -> np.ndarray:
    """Per-element popcount of a uint64 array."""
    x = np.asarray(x, dtype=np.uint64)
    return (
        _POP16[(x & _MASK16).astype(np.intp)].astype(np.int64)
        + _POP16[((x >> _U16) & _MASK16).astype(np.intp)]
        + _POP16[((x >> _U32) & _MASK16).astype(np.intp)]
        + _POP16[(x >> _U48).astype(np.intp)]
    )


def decode_table_numpy(code: np.ndarray, n_bits: int) -> np.ndarray:
    """Index of the nearest codeword for every received word in F_2^n.

    ``code`` must be sorted by lexicographic key; the first minimum wins.
    """
    code = np.ascontiguousarray(code, dtype=np.uint64)
    size = 1 << n_bits
    out = np.empty(size, dtype=np.uint32)
    ys = np.arange(size, dtype=np.uint64)
    chunk = max(1, (1 << 22) // max(len(code), 1))
    for s in range(0, size, chunk):
        block = ys[s:s + chunk, None] ^ code[None, :]
        out[s:s + chunk] = np.argmin(popcount64_numpy(block), axis=1)
    return out


def nearest_index_numpy(code: np.ndarray, y: int) -> int:
    """Index of the codeword nearest to a single received word."""
    code = np.asarray(code, dtype=np.uint64)
    return int(np.argmin(popcount64_numpy(code ^ np.uint64(y))))


def toeplitz_image_counts_numpy(l: int, m: int) -> np.ndarray:
    """For every Z in F_2^(l+m): the number of seeds with Z in Im M_p^T.

    The image of the transposed hash matrix is {(X^T u, u) : u in F_2^l};
    X^T u is accumulated over a Gray-code walk of u, one seed-array XOR per
    step.  Seeds are enumerated exhaustively (all 2^(l+m-1)).
    """
    n_seeds = 1 << (l + m - 1)
    mask = np.uint64((1 << m) - 1)
    seeds = np.arange(n_seeds, dtype=np.uint64)
    counts = np.zeros(1 << (l + m), dtype=np.int64)
    x = np.zeros(n_seeds, dtype=np.uint64)
    counts[0] = n_seeds  # u = 0 puts Z = 0 in the image for every seed
    gray_prev = 0
    for i in range(1, 1 << l):
        gray = i ^ (i >> 1)
        flip = (gray ^ gray_prev).bit_length() - 1
        x ^= (seeds >> np.uint64(flip)) & mask
        z = x | np.uint64(gray << m)
        counts += np.bincount(z.astype(np.int64), minlength=1 << (l + m))
        gray_prev = gray
    return counts


def restricted_decode_flags_numpy(cands: np.ndarray, good: np.ndarray,
                                  mask1: int, ys: np.ndarray) -> np.ndarray:
    """Decode each y by minimum weight on the masked coordinates only.

    ``cands`` is the (lex-sorted) candidate array, ``good[i]`` marks
    candidates whose decoding counts as success.  Returns 1 where decoding
    fails (first-minimum tie-break).
    """
    cands = np.asarray(cands, dtype=np.uint64)
    ys = np.asarray(ys, dtype=np.uint64)
    good = np.asarray(good, dtype=np.uint8)
    out = np.empty(len(ys), dtype=np.uint8)
    chunk = max(1, (1 << 22) // max(len(cands), 1))
    m1 = np.uint64(mask1)
    for s in range(0, len(ys), chunk):
        block = (ys[s:s + chunk, None] ^ cands[None, :]) & m1
        idx = np.argmin(popcount64_numpy(block), axis=1)
        out[s:s + chunk] = 1 - good[idx]
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _popcount64_scalar(x, table):
        return (
            np.int64(table[x & np.uint64(0xFFFF)])
            + np.int64(table[(x >> np.uint64(16)) & np.uint64(0xFFFF)])
            + np.int64(table[(x >> np.uint64(32)) & np.uint64(0xFFFF)])
            + np.int64(table[x >> np.uint64(48)])
        )

    @njit(cache=True)
    def _popcount64_arr(x, table, out):
        for i in range(x.size):
            out[i] = _popcount64_scalar(x[i], table)

    @njit(cache=True)
    def _decode_table(code, n_bits, table, out):
        size = 1 << n_bits
        for y in range(size):
            yy = np.uint64(y)
            best = np.int64(65)
            arg = 0
            for j in range(code.size):
                d = _popcount64_scalar(code[j] ^ yy, table)
                if d < best:
                    best = d
                    arg = j
            out[y] = arg

    @njit(cache=True)
    def _nearest_index(code, y, table):
        best = np.int64(65)
        arg = 0
        for j in range(code.size):
            d = _popcount64_scalar(code[j] ^ y, table)
            if d < best:
                best = d
                arg = j
        return arg

    @njit(cache=True)
    def _toeplitz_image_counts(l, m, counts):
        n_seeds = 1 << (l + m - 1)
        mask = np.uint64((1 << m) - 1)
        for s in range(n_seeds):
            seed = np.uint64(s)
            x = np.uint64(0)
            gray_prev = 0
            counts[0] += 1
            for i in range(1, 1 << l):
                gray = i ^ (i >> 1)
                flip = gray ^ gray_prev
                b = 0
                while flip > 1:
                    flip >>= 1
                    b += 1
                x ^= (seed >> np.uint64(b)) & mask
                counts[np.int64(x) | (gray << m)] += 1
                gray_prev = gray

    @njit(cache=True)
    def _restricted_decode_flags(cands, good, mask1, ys, table, out):
        for i in range(ys.size):
            y = ys[i]
            best = np.int64(65)
            arg = 0
            for j in range(cands.size):
                d = _popcount64_scalar((cands[j] ^ y) & mask1, table)
                if d < best:
                    best = d
                    arg = j
            out[i] = 1 - good[arg]

    def popcount64_numba(x: np.ndarray) -> np.ndarray:
        x = np.ascontiguousarray(x, dtype=np.uint64)
        out = np.empty(x.shape, dtype=np.int64)
        _popcount64_arr(x.ravel(), _POP16, out.ravel())
        return out

    def decode_table_numba(code: np.ndarray, n_bits: int) -> np.ndarray:
        code = np.ascontiguousarray(code, dtype=np.uint64)
        out = np.empty(1 << n_bits, dtype=np.uint32)
        _decode_table(code, n_bits, _POP16, out)
        return out

    def nearest_index_numba(code: np.ndarray, y: int) -> int:
        code = np.ascontiguousarray(code, dtype=np.uint64)
        return int(_nearest_index(code, np.uint64(y), _POP16))

    def toeplitz_image_counts_numba(l: int, m: int) -> np.ndarray:
        counts = np.zeros(1 << (l + m), dtype=np.int64)
        _toeplitz_image_counts(l, m, counts)
        return counts

    def restricted_decode_flags_numba(cands, good, mask1, ys) -> np.ndarray:
        cands = np.ascontiguousarray(cands, dtype=np.uint64)
        good = np.ascontiguousarray(good, dtype=np.uint8)
        ys = np.ascontiguousarray(ys, dtype=np.uint64)
        out = np.empty(len(ys), dtype=np.uint8)
        _restricted_decode_flags(cands, good, np.uint64(mask1), ys, _POP16, out)
        return out

else:  # pragma: no cover - exercised only when numba is absent
    popcount64_numba = None
    decode_table_numba = None
    nearest_index_numba = None
    toeplitz_image_counts_numba = None
    restricted_decode_flags_numba = None


if USE_NUMBA:
    popcount64 = popcount64_numba
    decode_table = decode_table_numba
    nearest_index = nearest_index_numba
    toeplitz_image_counts = toeplitz_image_counts_numba
    restricted_decode_flags = restricted_decode_flags_numba
    BACKEND = "numba"
else:
    popcount64 = popcount64_numpy
    decode_table = decode_table_numpy
    nearest_index = nearest_index_numpy
    toeplitz_image_counts = toeplitz_image_counts_numpy
    restricted_decode_flags = restricted_decode_flags_numpy
    BACKEND = "numpy"

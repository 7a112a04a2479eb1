"""Dense GF(2) linear algebra on bit-packed integers.

Vectors and matrices keep their bits in Python integers (bit ``i`` of the
packed integer is coordinate ``i``), which makes XOR row operations,
products and syndrome scans allocation-free at desk scale.  Exhaustive hot
loops (decode tables, membership counts) convert to numpy ``uint64`` arrays
and run through :mod:`decoybb84.kernels`.

Conventions:
    * Coordinate 0 is the least significant bit of the packed integer.
    * "Lexicographically smallest" compares the coordinate tuple
      ``(v[0], v[1], ...)``.  Minimum-distance decoding breaks ties this
      way so every decode is deterministic and reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DimensionMismatch

DEFAULT_DECODE_GUARD = 1 << 20
DEFAULT_SPAN_GUARD = 1 << 20


def _parity(x: int) -> int:
    return x.bit_count() & 1


def lex_key(bits: int, length: int) -> int:
    """Integer whose ordering equals lexicographic order of the bit tuple."""
    key = 0
    for i in range(length):
        key = (key << 1) | ((bits >> i) & 1)
    return key


@dataclass(frozen=True)
class BitVector:
    """Immutable bit vector over GF(2), packed into one integer."""

    length: int
    bits: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits outside [0, 2^length)")

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        value = 0
        n = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError("bits must be 0 or 1")
            value |= b << n
            n += 1
        return cls(n, value)

    @classmethod
    def from_int(cls, length: int, value: int) -> "BitVector":
        return cls(length, value)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise DimensionMismatch("vector lengths differ")
        return BitVector(self.length, self.bits ^ other.bits)

    def __len__(self) -> int:
        return self.length

    def weight(self) -> int:
        """Hamming weight."""
        return self.bits.bit_count()

    def to_tuple(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.length))

    def to_array(self) -> np.ndarray:
        return np.array(self.to_tuple(), dtype=np.uint8)

    def lex_key(self) -> int:
        return lex_key(self.bits, self.length)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.to_tuple())


@dataclass(frozen=True)
class BitMatrix:
    """Immutable binary matrix, rows packed as integers (row-major)."""

    rows: int
    cols: int
    row_bits: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative shape")
        if len(self.row_bits) != self.rows:
            raise ValueError("row count mismatch")
        for r in self.row_bits:
            if r < 0 or r >> self.cols:
                raise ValueError("row bits outside [0, 2^cols)")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        packed = []
        cols = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged rows")
            packed.append(BitVector.from_bits(row).bits)
        return cls(len(rows), cols, tuple(packed))

    @classmethod
    def from_row_ints(cls, rows: int, cols: int, row_bits: Sequence[int]) -> "BitMatrix":
        return cls(rows, cols, tuple(row_bits))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def from_array(cls, a: np.ndarray) -> "BitMatrix":
        a = np.asarray(a, dtype=np.uint8) & 1
        return cls.from_rows(a.tolist())

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.row_bits[i])

    def entry(self, i: int, j: int) -> int:
        return (self.row_bits[i] >> j) & 1

    def transpose(self) -> "BitMatrix":
        cols = []
        for j in range(self.cols):
            c = 0
            for i in range(self.rows):
                c |= ((self.row_bits[i] >> j) & 1) << i
            cols.append(c)
        return BitMatrix(self.cols, self.rows, tuple(cols))

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i in range(self.rows):
            for j in range(self.cols):
                out[i, j] = self.entry(i, j)
        return out


def mat_vec_mul(m: BitMatrix, v: BitVector) -> BitVector:
    """Product ``M v`` over GF(2); result[i] is the parity of row_i AND v."""
    if m.cols != v.length:
        raise DimensionMismatch(f"matrix cols {m.cols} != vector length {v.length}")
    out = 0
    for i, row in enumerate(m.row_bits):
        out |= _parity(row & v.bits) << i
    return BitVector(m.rows, out)


def _eliminate(rows: list[int], cols: int) -> tuple[list[int], list[int]]:
    """In-place Gaussian elimination; returns (reduced rows, pivot columns)."""
    work = rows[:]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = None
        for k in range(r, len(work)):
            if (work[k] >> c) & 1:
                pivot = k
                break
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        for k in range(len(work)):
            if k != r and ((work[k] >> c) & 1):
                work[k] ^= work[r]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work, pivots


def rank(m: BitMatrix) -> int:
    """GF(2) rank via Gaussian elimination."""
    _, pivots = _eliminate(list(m.row_bits), m.cols)
    return len(pivots)


def kernel_basis(m: BitMatrix) -> list[BitVector]:
    """Basis of ``{v : M v = 0}`` from the reduced row-echelon form."""
    work, pivots = _eliminate(list(m.row_bits), m.cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = 1 << free
        for i, p in enumerate(pivots):
            if (work[i] >> free) & 1:
                v |= 1 << p
        basis.append(BitVector(m.cols, v))
    return basis


def solve(m: BitMatrix, v: BitVector) -> BitVector | None:
    """One solution ``u`` of ``M u = v``, or None if ``v`` is not in the image.

    Works on the transposed system: the image of M is the row space of M^T.
    """
    if m.rows != v.length:
        raise DimensionMismatch(f"matrix rows {m.rows} != vector length {v.length}")
    # Augment each column of M (as a row of M^T) with the unit vector that
    # remembers which combination of columns produced it.
    aug = []
    for j in range(m.cols):
        col = 0
        for i in range(m.rows):
            col |= ((m.row_bits[i] >> j) & 1) << i
        aug.append(col | (1 << (m.rows + j)))
    work, _ = _eliminate(aug, m.rows)  # pivots only in the first m.rows columns
    residual = v.bits
    combo = 0
    mask = (1 << m.rows) - 1
    for row in work:
        lead = row & mask
        if lead == 0:
            continue
        low = lead & -lead
        if residual & low:
            residual ^= lead
            combo ^= row >> m.rows
    if residual != 0:
        return None
    return BitVector(m.cols, combo)


def image_membership(m: BitMatrix, v: BitVector) -> bool:
    """True iff ``v`` is in the column space of ``M`` (some ``u`` has ``M u = v``)."""
    return solve(m, v) is not None


def dual_code_basis(m: BitMatrix, span: str = "rows") -> list[BitVector]:
    """Basis of the dual of the code spanned by the rows (or columns) of ``M``.

    ``span="rows"`` treats the rows of M as generators, so the dual is
    exactly the kernel of M.  ``span="cols"`` uses the columns instead.
    """
    if span == "rows":
        return kernel_basis(m)
    if span == "cols":
        return kernel_basis(m.transpose())
    raise ValueError("span must be 'rows' or 'cols'")


def span_ints(basis: Sequence[int], guard: int = DEFAULT_SPAN_GUARD) -> list[int]:
    """All 2^k XOR combinations of the given packed vectors (Gray-code walk)."""
    k = len(basis)
    if 1 << k > guard:
        raise CapacityError(f"span of dimension {k} exceeds guard {guard}")
    out = [0] * (1 << k)
    cur = 0
    for i in range(1, 1 << k):
        cur ^= basis[(i & -i).bit_length() - 1]
        out[i] = cur
    return out


def span_vectors(basis: Sequence[BitVector], length: int | None = None,
                 guard: int = DEFAULT_SPAN_GUARD) -> list[BitVector]:
    """All elements of the span of ``basis`` as BitVectors."""
    if length is None:
        if not basis:
            raise ValueError("length required for an empty basis")
        length = basis[0].length
    for b in basis:
        if b.length != length:
            raise DimensionMismatch("mixed vector lengths in basis")
    return [BitVector(length, x) for x in span_ints([b.bits for b in basis], guard)]


def column_space(m: BitMatrix, guard: int = DEFAULT_SPAN_GUARD) -> list[int]:
    """All packed elements of ``Im M`` (the span of M's columns)."""
    cols = [0] * m.cols
    for i, row in enumerate(m.row_bits):
        for j in range(m.cols):
            cols[j] |= ((row >> j) & 1) << i
    # Reduce to an independent set first so the guard reflects the true size.
    reduced = [r for r in _eliminate(cols, m.rows)[0] if r]
    return span_ints(reduced, guard)


def min_distance_decode(received: BitVector,
                        codewords: Sequence[BitVector],
                        guard: int = DEFAULT_DECODE_GUARD) -> BitVector:
    """Codeword at minimum Hamming distance from ``received``.

    Ties are broken by the lexicographically smallest codeword.  Exhaustive
    by design; refuses codes larger than ``guard``.
    """
    if not codewords:
        raise ValueError("empty code")
    if len(codewords) > guard:
        raise CapacityError(f"code size {len(codewords)} exceeds guard {guard}")
    n = received.length
    best = None
    best_dist = n + 1
    best_key = None
    for c in codewords:
        if c.length != n:
            raise DimensionMismatch("codeword length differs from received word")
        d = (c.bits ^ received.bits).bit_count()
        if d < best_dist:
            best, best_dist, best_key = c, d, None
        elif d == best_dist:
            if best_key is None:
                best_key = best.lex_key()
            k = c.lex_key()
            if k < best_key:
                best, best_key = c, k
    return best

"""Toeplitz privacy amplification and its exact universality profile.

The hash matrix is the l x (l+m) block matrix (X, I): X is l x m with
``X[i][j] = seed[i+j]`` (0-based; seed bit k is the textbook-indexed random
variable Y_{k+1}, so the diagonals run over Y_1..Y_{l+m-1}) and I is the l x l identity in the
last l columns.  Compressing an (l+m)-bit string Z to the l bits M_p Z
sacrifices m bits.

The security condition on the hash family is that for every nonzero Z the
seed-fraction with Z in Im M_p^T is at most 2^-m.  ``universality_profile``
computes that fraction exactly (as a rational number) for every nonzero Z
by enumerating all 2^(l+m-1) seeds.  A completely random binary matrix is
provided behind the same interface for comparison; the security condition
is all the downstream bounds need, so both families are interchangeable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import CapacityError, DimensionMismatch
from .gf2 import BitMatrix, BitVector, mat_vec_mul

DEFAULT_SEED_GUARD = 20


@dataclass(frozen=True)
class ToeplitzHash:
    """Hash matrix (X, I) realized from an (l+m-1)-bit seed."""

    l: int
    m: int
    seed: BitVector

    def __post_init__(self):
        if self.l < 1 or self.m < 0:
            raise ValueError("need l >= 1 and m >= 0")
        if self.seed.length != self.l + self.m - 1:
            raise DimensionMismatch(
                f"seed length {self.seed.length} != l+m-1 = {self.l + self.m - 1}")

    def matrix(self) -> BitMatrix:
        return build_toeplitz(self.l, self.m, self.seed)

    def apply(self, z: BitVector) -> BitVector:
        return hash_key(self, z)


def build_toeplitz(l: int, m: int, seed: BitVector) -> BitMatrix:
    """Realize the hash matrix (X, I) from its seed bits."""
    if seed.length != l + m - 1:
        raise DimensionMismatch(f"seed length {seed.length} != l+m-1 = {l + m - 1}")
    rows = []
    for i in range(l):
        row = 0
        for j in range(m):
            row |= seed[i + j] << j
        row |= 1 << (m + i)
        rows.append(row)
    return BitMatrix(l, l + m, tuple(rows))


def hash_key(h: ToeplitzHash, z: BitVector) -> BitVector:
    """Compress l+m bits to the l output bits M_p z."""
    if z.length != h.l + h.m:
        raise DimensionMismatch(f"input length {z.length} != l+m = {h.l + h.m}")
    return mat_vec_mul(h.matrix(), z)


def sample_seed(rng: np.random.Generator, l: int, m: int) -> ToeplitzHash:
    """Uniform hash seed drawn from the given deterministic source."""
    bits = rng.integers(0, 2, size=l + m - 1)
    return ToeplitzHash(l, m, BitVector.from_bits(int(b) for b in bits))


def transpose_image_membership(h: ToeplitzHash, z: BitVector) -> bool:
    """True iff z = (x, y) lies in Im M_p^T, i.e. x = X^T y."""
    if z.length != h.l + h.m:
        raise DimensionMismatch("z must have length l+m")
    x_part = z.bits & ((1 << h.m) - 1)
    y_part = z.bits >> h.m
    acc = 0
    for i in range(h.l):
        if (y_part >> i) & 1:
            acc ^= (h.seed.bits >> i) & ((1 << h.m) - 1)
    return acc == x_part


def universality_profile(l: int, m: int,
                         guard: int = DEFAULT_SEED_GUARD) -> dict[int, Fraction]:
    """Exact membership fraction for every nonzero Z, over all seeds.

    Keys are packed Z values (x-part in the low m bits, y-part above);
    values are exact rationals with denominator 2^(l+m-1).
    """
    if l + m - 1 > guard:
        raise CapacityError(
            f"seed space 2^{l + m - 1} exceeds guard 2^{guard}")
    counts = kernels.toeplitz_image_counts(l, m)
    denom = 1 << (l + m - 1)
    return {z: Fraction(int(counts[z]), denom) for z in range(1, 1 << (l + m))}


def profile_summary(profile: dict[int, Fraction], m: int) -> dict:
    """Classify a profile against the 2^-m condition.

    Returns the worst fraction, whether the bound holds for every nonzero Z,
    and the three structural facts used in the exhaustive verification:
    zero fraction when the y-part vanishes, exact 2^-m when both parts are
    nonzero.
    """
    bound = Fraction(1, 1 << m)
    worst = Fraction(0)
    ok = True
    xonly_zero = True
    mixed_sharp = True
    xmask = (1 << m) - 1
    for z, frac in profile.items():
        worst = max(worst, frac)
        if frac > bound:
            ok = False
        x_part = z & xmask
        y_part = z >> m
        if y_part == 0 and x_part != 0 and frac != 0:
            xonly_zero = False
        if y_part != 0 and x_part != 0 and frac != bound:
            mixed_sharp = False
    return {
        "bound": bound,
        "max_fraction": worst,
        "within_bound": ok,
        "zero_when_y_zero": xonly_zero,
        "sharp_when_both_nonzero": mixed_sharp,
    }


@dataclass(frozen=True)
class RandomMatrixHash:
    """Completely random l x (l+m) hash matrix, same interface as Toeplitz.

    Needs (l+m)*l random bits instead of l+m-1; kept for comparison tests
    since the downstream theory only uses the 2^-m membership condition.
    """

    l: int
    m: int
    matrix_bits: BitMatrix

    def matrix(self) -> BitMatrix:
        return self.matrix_bits

    def apply(self, z: BitVector) -> BitVector:
        return mat_vec_mul(self.matrix_bits, z)


def sample_random_matrix(rng: np.random.Generator, l: int, m: int) -> RandomMatrixHash:
    rows = rng.integers(0, 2, size=(l, l + m))
    return RandomMatrixHash(l, m, BitMatrix.from_rows(rows.tolist()))


def random_matrix_universality_profile(l: int, m: int,
                                       guard_bits: int = 16) -> dict[int, Fraction]:
    """Exact membership fractions for the fully random matrix family.

    Enumerates all 2^(l*(l+m)) matrices, so only tiny sizes are feasible.
    """
    n_bits = l * (l + m)
    if n_bits > guard_bits:
        raise CapacityError(f"matrix space 2^{n_bits} exceeds guard 2^{guard_bits}")
    width = l + m
    counts = np.zeros(1 << width, dtype=np.int64)
    for mat in range(1 << n_bits):
        rows = tuple((mat >> (i * width)) & ((1 << width) - 1) for i in range(l))
        # Row space of M_p equals Im M_p^T.
        seen = {0}
        for r in rows:
            if r != 0 and r not in seen:
                seen |= {s ^ r for s in seen}
        for z in seen:
            counts[z] += 1
    denom = 1 << n_bits
    return {z: Fraction(int(counts[z]), denom) for z in range(1, 1 << width)}

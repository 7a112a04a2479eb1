"""GF(2) linear algebra: worked examples plus exhaustive consistency checks."""

import numpy as np
import pytest

from decoybb84.errors import CapacityError, DimensionMismatch
from decoybb84.gf2 import (BitMatrix, BitVector, dual_code_basis, image_membership,
                           kernel_basis, mat_vec_mul, min_distance_decode, rank,
                           solve, span_vectors)


def bv(*bits):
    return BitVector.from_bits(bits)


class TestMatVecMul:
    def test_identity(self):
        m = BitMatrix.identity(3)
        assert mat_vec_mul(m, bv(1, 0, 1)) == bv(1, 0, 1)

    def test_xor_by_hand(self):
        m = BitMatrix.from_rows([[1, 1], [0, 1]])
        assert mat_vec_mul(m, bv(1, 1)) == bv(0, 1)

    def test_zero_matrix(self):
        m = BitMatrix.zeros(3, 4)
        assert mat_vec_mul(m, bv(1, 1, 1, 1)) == BitVector.zeros(3)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mat_vec_mul(BitMatrix.identity(3), bv(1, 0))


class TestRank:
    def test_identity(self):
        assert rank(BitMatrix.identity(4)) == 4

    def test_repeated_rows(self):
        assert rank(BitMatrix.from_rows([[1, 1], [1, 1]])) == 1

    def test_zero(self):
        assert rank(BitMatrix.zeros(3, 3)) == 0

    def test_rank_nullity(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            rows = int(rng.integers(1, 7))
            cols = int(rng.integers(1, 9))
            m = BitMatrix.from_rows(rng.integers(0, 2, (rows, cols)).tolist())
            assert rank(m) + len(kernel_basis(m)) == cols


class TestKernelBasis:
    def test_identity_trivial(self):
        assert kernel_basis(BitMatrix.identity(2)) == []

    def test_parity_check(self):
        basis = kernel_basis(BitMatrix.from_rows([[1, 1]]))
        assert [b.to_tuple() for b in basis] == [(1, 1)]

    def test_zero_matrix(self):
        assert len(kernel_basis(BitMatrix.zeros(2, 3))) == 3

    def test_spans_exact_kernel_exhaustively(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            rows = int(rng.integers(1, 6))
            cols = int(rng.integers(1, 12))
            m = BitMatrix.from_rows(rng.integers(0, 2, (rows, cols)).tolist())
            basis = kernel_basis(m)
            spanned = {v.bits for v in span_vectors(basis, length=cols)}
            brute = {v for v in range(1 << cols)
                     if mat_vec_mul(m, BitVector(cols, v)).bits == 0}
            assert spanned == brute


class TestImageMembership:
    def test_zero_vector_always_member(self):
        m = BitMatrix.from_rows([[1, 0], [1, 1], [0, 1]])
        assert image_membership(m, BitVector.zeros(3))

    def test_identity_all_members(self):
        m = BitMatrix.identity(3)
        for v in range(8):
            assert image_membership(m, BitVector(3, v))

    def test_repetition_column(self):
        m = BitMatrix.from_rows([[1], [1]])
        assert image_membership(m, bv(1, 1))
        assert not image_membership(m, bv(1, 0))

    def test_consistent_with_product(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            rows = int(rng.integers(1, 7))
            cols = int(rng.integers(1, 7))
            m = BitMatrix.from_rows(rng.integers(0, 2, (rows, cols)).tolist())
            u = BitVector(cols, int(rng.integers(0, 1 << cols)))
            v = mat_vec_mul(m, u)
            assert image_membership(m, v)
            got = solve(m, v)
            assert got is not None and mat_vec_mul(m, got) == v


class TestDualCode:
    def test_full_rank_square_empty(self):
        assert dual_code_basis(BitMatrix.identity(3)) == []

    def test_repetition_self_dual(self):
        gen = BitMatrix.from_rows([[1, 1]])
        dual = dual_code_basis(gen)
        assert {v.bits for v in span_vectors(dual, length=2)} == {0, 0b11}

    def test_zero_code_dual_is_everything(self):
        dual = dual_code_basis(BitMatrix.zeros(1, 2))
        assert len(dual) == 2

    def test_double_dual_spans_original(self):
        rng = np.random.default_rng(13)
        for _ in range(30):
            rows = int(rng.integers(1, 6))
            cols = int(rng.integers(1, 10))
            m = BitMatrix.from_rows(rng.integers(0, 2, (rows, cols)).tolist())
            dual = dual_code_basis(m)
            ddual = dual_code_basis(
                BitMatrix(len(dual), cols, tuple(v.bits for v in dual)))
            original = {v.bits for v in span_vectors(
                [m.row(i) for i in range(rows)], length=cols)}
            recovered = {v.bits for v in span_vectors(ddual, length=cols)}
            assert recovered == original


class TestMinDistanceDecode:
    def test_member_decodes_to_itself(self):
        code = [bv(0, 0, 0), bv(1, 1, 1)]
        assert min_distance_decode(bv(1, 1, 1), code) == bv(1, 1, 1)

    def test_majority(self):
        code = [bv(0, 0, 0), bv(1, 1, 1)]
        assert min_distance_decode(bv(1, 1, 0), code) == bv(1, 1, 1)

    def test_lexicographic_tie_break(self):
        code = [bv(1, 1), bv(0, 0)]
        assert min_distance_decode(bv(1, 0), code) == bv(0, 0)

    def test_empty_code_rejected(self):
        with pytest.raises(ValueError):
            min_distance_decode(bv(1), [])

    def test_guard(self):
        code = [BitVector(2, v) for v in range(4)]
        with pytest.raises(CapacityError):
            min_distance_decode(bv(0, 0), code, guard=3)

    def test_optimal_distance_exhaustive(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            size = int(rng.integers(1, 1 << min(n, 5)))
            code = [BitVector(n, int(v))
                    for v in rng.integers(0, 1 << n, size=size)]
            received = BitVector(n, int(rng.integers(0, 1 << n)))
            best = min_distance_decode(received, code)
            d = (best.bits ^ received.bits).bit_count()
            assert all((c.bits ^ received.bits).bit_count() >= d for c in code)


class TestBitVector:
    def test_weight_bounded_by_length(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(0, 20))
            v = BitVector(n, int(rng.integers(0, 1 << n)) if n else 0)
            assert 0 <= v.weight() <= n

    def test_bits_beyond_length_rejected(self):
        with pytest.raises(ValueError):
            BitVector(2, 0b100)

    def test_lex_key_orders_tuples(self):
        vs = [BitVector(3, v) for v in range(8)]
        by_key = sorted(vs, key=lambda v: v.lex_key())
        by_tuple = sorted(vs, key=lambda v: v.to_tuple())
        assert [v.bits for v in by_key] == [v.bits for v in by_tuple]

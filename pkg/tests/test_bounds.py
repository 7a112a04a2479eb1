"""Closed-form bound formulas: worked values, clamps, monotonicity, decoding."""

import numpy as np
import pytest

from decoybb84.bounds import (BoundInputs, averaged_eve_info_bound,
                              averaged_success_bound, binary_entropy,
                              distinguishability_bounds, eve_info_bound,
                              forward_bound, hbar, max_bound_over_inputs,
                              min_decoding_bound, per_bit_eve_info_bound,
                              reverse_bound, success_bound, twoway_bound,
                              verify_proposition_decoding, worst_case_t_bound)
from decoybb84.errors import CapacityError


class TestHbar:
    def test_zero(self):
        assert hbar(0.0) == 0.0

    def test_clamped_above_half(self):
        assert hbar(0.7) == 1.0
        assert hbar(1.0) == 1.0

    def test_quarter(self):
        assert hbar(0.25) == pytest.approx(0.8112781244591328)

    def test_continuous_at_half(self):
        assert hbar(0.5) == pytest.approx(1.0)
        assert hbar(0.5 - 1e-12) == pytest.approx(1.0, abs=1e-9)

    def test_domain(self):
        with pytest.raises(ValueError):
            hbar(-0.01)
        with pytest.raises(ValueError):
            hbar(1.01)

    def test_concave_on_lower_half(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            a, b = sorted(rng.uniform(0, 0.5, size=2))
            lam = rng.random()
            mid = lam * a + (1 - lam) * b
            assert hbar(mid) >= lam * hbar(a) + (1 - lam) * hbar(b) - 1e-12


class TestEveInfoBound:
    def test_zero(self):
        assert eve_info_bound(0.0, 12) == 0.0

    def test_half(self):
        assert eve_info_bound(0.5, 10) == pytest.approx(6.0)

    def test_quarter(self):
        assert eve_info_bound(0.25, 4) == pytest.approx(1.8112781244591328)


class TestDistinguishabilityBounds:
    def test_zero(self):
        assert distinguishability_bounds(0.0) == (1.0, 0.0, 1.0, 0.0)

    def test_linear_region(self):
        assert distinguishability_bounds(0.1) == \
            pytest.approx((0.8, 0.4, 0.9, 0.2))

    def test_trace_norm_clamp(self):
        fid_pair, tn_pair, _, _ = distinguishability_bounds(0.6)
        assert tn_pair == 2.0
        assert fid_pair == 0.0  # 1 - 2*0.6 clamps up to a valid lower bound


class TestSuccessBound:
    def test_blind_guessing(self):
        assert success_bound(0.0, 8) == pytest.approx(2.0 ** -8)

    def test_full_phase_error(self):
        assert success_bound(1.0, 8) == pytest.approx(1 - 2.0 ** -8)

    def test_worked_value(self):
        assert success_bound(0.01, 8) == pytest.approx(0.026241, abs=1e-6)

    def test_concave_in_p(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            a, b = rng.random(2)
            lam = rng.random()
            lhs = success_bound(lam * a + (1 - lam) * b, 6)
            rhs = lam * success_bound(a, 6) + (1 - lam) * success_bound(b, 6)
            assert lhs >= rhs - 1e-12


class TestMinDecodingBound:
    def test_error_free(self):
        assert min_decoding_bound(5, 0, 0, 3) == pytest.approx(0.125)

    def test_worked(self):
        assert min_decoding_bound(4, 2, 2, 8) == pytest.approx(0.25)

    def test_clamped_to_one(self):
        assert min_decoding_bound(2, 5, 1, 3) == 1.0

    def test_k1_zero(self):
        assert min_decoding_bound(0, 2, 0, 5) == pytest.approx(0.125)

    def test_t_out_of_range(self):
        with pytest.raises(ValueError):
            min_decoding_bound(3, 0, 4, 2)

    def test_always_in_unit_interval(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            k1 = int(rng.integers(0, 30))
            k2 = int(rng.integers(0, 30))
            t = int(rng.integers(0, k1 + 1))
            m = int(rng.integers(0, 60))
            v = min_decoding_bound(k1, k2, t, m)
            assert 0.0 < v <= 1.0


def make_inputs(j, m, t_dist):
    return BoundInputs(j0=j[0], j1=j[1], j2=j[2], j3=j[3], j4=j[4], j5=j[5],
                       m=m, t_distribution=t_dist)


class TestAveragedBounds:
    def test_forward_point_mass(self):
        inputs = make_inputs((0, 5, 0, 0, 0, 0), 10, {0: 1.0})
        assert forward_bound(inputs) == pytest.approx(2.0 ** -10)

    def test_forward_worked(self):
        inputs = make_inputs((0, 4, 2, 0, 0, 0), 8, {2: 1.0})
        assert forward_bound(inputs) == pytest.approx(0.25)

    def test_forward_two_term_average(self):
        inputs = make_inputs((0, 4, 0, 0, 0, 0), 6, {0: 0.5, 4: 0.5})
        assert forward_bound(inputs) == pytest.approx(0.5 * (1 / 64 + 0.25))

    def test_reverse_point_mass(self):
        inputs = make_inputs((0, 5, 0, 0, 0, 0), 10, {0: 1.0})
        assert reverse_bound(inputs) == pytest.approx(2.0 ** -10)

    def test_reverse_worked(self):
        inputs = make_inputs((3, 2, 1, 0, 0, 0), 10, {1: 1.0})
        assert reverse_bound(inputs) == pytest.approx(2.0 ** -4)

    def test_reverse_below_forward_when_exponent_smaller(self):
        inputs = make_inputs((1, 4, 1, 0, 2, 1), 9, {1: 1.0})
        # reverse exponent J0+J2 = 2; forward J2+J4+J5 = 4
        assert reverse_bound(inputs) < forward_bound(inputs)

    def test_twoway_trivial(self):
        inputs = make_inputs((0, 6, 0, 0, 0, 0), 4, {0: 1.0})
        assert twoway_bound(inputs) == pytest.approx(2.0 ** -4)

    def test_twoway_worked(self):
        inputs = make_inputs((1, 2, 0, 0, 1, 0), 5, {0: 1.0})
        assert twoway_bound(inputs) == pytest.approx(2.0 ** -3)

    def test_twoway_dominates(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            j = tuple(int(x) for x in rng.integers(0, 20, size=6))
            m = int(rng.integers(0, 40))
            ts = rng.integers(0, j[1] + 1, size=3)
            ps = rng.dirichlet(np.ones(3))
            dist = {}
            for t, p in zip(ts, ps):
                dist[int(t)] = dist.get(int(t), 0.0) + float(p)
            inputs = make_inputs(j, m, dist)
            two = twoway_bound(inputs)
            assert two >= forward_bound(inputs) - 1e-15
            assert two >= reverse_bound(inputs) - 1e-15

    def test_monotone_in_m_and_counts(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            j = [int(x) for x in rng.integers(0, 15, size=6)]
            m = int(rng.integers(1, 30))
            t = int(rng.integers(0, j[1] + 1))
            dist = {t: 1.0}
            base = forward_bound(make_inputs(tuple(j), m, dist))
            assert forward_bound(make_inputs(tuple(j), m + 1, dist)) <= base + 1e-15
            j_up = list(j)
            j_up[2] += 1  # J2 enters every K2 variant
            assert forward_bound(make_inputs(tuple(j_up), m, dist)) >= base - 1e-15

    def test_missing_distribution(self):
        with pytest.raises(ValueError):
            forward_bound(make_inputs((0, 3, 0, 0, 0, 0), 2, None))

    def test_max_over_strategies(self):
        cands = [make_inputs((0, 4, k2, 0, 0, 0), 6, {1: 1.0}) for k2 in range(4)]
        val, best = max_bound_over_inputs(cands, "forward")
        assert best.j2 == 3 and val == forward_bound(cands[-1])

    def test_worst_case_t(self):
        assert worst_case_t_bound(4, 0, 6) == \
            pytest.approx(min_decoding_bound(4, 0, 2, 6))


class TestAveragedInfoSuccess:
    def test_worked_value(self):
        assert averaged_eve_info_bound(2.0 ** -10, 20) == \
            pytest.approx(0.0302734375)

    def test_unit(self):
        assert averaged_eve_info_bound(1.0, 0) == pytest.approx(1.0)

    def test_limit_at_zero(self):
        assert averaged_eve_info_bound(0.0, 50) == 0.0
        assert averaged_eve_info_bound(1e-300, 50) < 1e-290

    def test_success_matches_closed_form(self):
        assert averaged_success_bound(0.0, 5) == pytest.approx(2.0 ** -5)
        assert averaged_success_bound(0.01, 8) == pytest.approx(0.026241, abs=1e-6)

    def test_success_monotone_below_half(self):
        # Monotone increasing in the averaged probability for P <= 1/2
        # (the derivative sqrt((1-p)/q) - sqrt(p/(1-q)) stays nonnegative).
        n_under = 4
        grid = np.linspace(0.0, 0.5, 200)
        vals = [averaged_success_bound(p, n_under) for p in grid]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_per_bit(self):
        assert per_bit_eve_info_bound(0.0, 10) == 0.0
        assert per_bit_eve_info_bound(0.5, 100) == pytest.approx(0.51)

    def test_per_bit_decreasing_in_n(self):
        vals = [per_bit_eve_info_bound(0.3, n) for n in range(1, 50)]
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))

    def test_entropy_mixture_concavity(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            ps = rng.random(4)
            ws = rng.dirichlet(np.ones(4))
            mixed = float((ws * ps).sum())
            assert hbar(mixed) >= \
                sum(w * hbar(p) for w, p in zip(ws, ps)) - 1e-12


class TestOracleDominance:
    """The averaged decoding bound dominates the exact oracle value.

    Channel: n1 'single' positions carrying a fixed phase pattern of weight
    t (so the error-count variable is deterministic) plus k2 positions with
    adversarial (uniform) phase.  The exact phase-error probability of
    minimum-distance decoding, averaged over every Toeplitz hash seed, must
    stay below min{2^(n1 h(t/n1) + k2 - m), 1}.
    """

    @pytest.mark.parametrize("n1,k2,t,lm,m", [
        (5, 0, 0, 4, 2), (5, 0, 1, 4, 2), (4, 2, 1, 4, 2),
        (6, 1, 2, 5, 3), (3, 3, 0, 4, 3),
    ])
    def test_averaged_oracle_below_bound(self, n1, k2, t, lm, m):
        from decoybb84.gf2 import BitMatrix, BitVector, rank
        from decoybb84.hashing import build_toeplitz
        from decoybb84.oracle import reduce_code_channel

        n = n1 + k2
        l = lm - m
        rng = np.random.default_rng(n1 * 100 + k2 * 10 + t)
        while True:
            m_e = BitMatrix.from_rows(rng.integers(0, 2, (n, lm)).tolist())
            if rank(m_e) == lm:
                break
        # fixed weight-t pattern on the first n1 positions
        pattern = 0
        for i in rng.choice(n1, size=t, replace=False):
            pattern |= 1 << int(i)
        laws = []
        for i in range(n1):
            z = (pattern >> i) & 1
            laws.append({(0, z): 1.0})
        laws.extend({(0, 0): 0.5, (0, 1): 0.5} for _ in range(k2))

        total = 0.0
        n_seeds = 1 << (lm - 1)
        for seed in range(n_seeds):
            m_p = build_toeplitz(l, m, BitVector(lm - 1, seed))
            _, pph = reduce_code_channel(laws, m_e, m_p)
            total += pph
        avg = total / n_seeds
        bound = min(1.0, 2.0 ** (n1 * hbar(t / n1) + k2 - m))
        assert avg <= bound + 1e-12
        assert avg <= forward_bound(BoundInputs(
            j1=n1, j2=k2, m=m, t_distribution={t: 1.0})) + 1e-12


class TestPropositionDecoding:
    def test_error_free_within_two_to_minus_m(self):
        res = verify_proposition_decoding(n0=2, n1=4, n2=0, t=0,
                                          c1_dim=5, m=3,
                                          rng=np.random.default_rng(0))
        assert res.bound == pytest.approx(2.0 ** -3)
        assert res.empirical_max <= res.bound

    def test_worked_bound_value(self):
        res = verify_proposition_decoding(n0=2, n1=4, n2=1, t=2,
                                          c1_dim=7, m=6,
                                          rng=np.random.default_rng(1))
        assert res.bound == pytest.approx(0.5)
        assert res.empirical_max <= 0.5

    def test_adversarial_part2_still_bounded(self):
        # All part-2 patterns are enumerated; the reported mean is the
        # worst part-2 slice, which must stay below the bound.
        res = verify_proposition_decoding(n0=1, n1=4, n2=2, t=1,
                                          c1_dim=6, m=4,
                                          rng=np.random.default_rng(2))
        assert res.empirical_mean <= res.empirical_max <= res.bound + 1e-12

    def test_guard(self):
        with pytest.raises(CapacityError):
            verify_proposition_decoding(8, 8, 0, 1, 10, 4, guard_n=14)

    def test_binary_entropy_helper(self):
        assert binary_entropy(0.5) == pytest.approx(1.0)
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

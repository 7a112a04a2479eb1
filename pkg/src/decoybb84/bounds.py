"""Closed-form finite-length security bounds and their verification helpers.

Everything here is a function of the detected-pulse classification (vacuum /
single / multi, normal or dark count), the phase-error count t among normal
single-photon detections, and the sacrifice-bit budget m:

* ``min_decoding_bound``        min{2^(K1 hbar(t/K1) + K2 - m), 1}
* ``forward_bound``             K2 = J2 + J4 + J5   (one-way, Alice -> Bob)
* ``reverse_bound``             K2 = J0 + J2        (one-way, Bob -> Alice)
* ``twoway_bound``              K2 = J0 + J2 + J4 + J5
* ``eve_info_bound``            hbar(P) + l P   (information from phase error)
* ``success_bound``             covariant-guessing bound in P and key size
* averaged variants over the hash/statistics randomness.

``verify_proposition_decoding`` replays the underlying decoding-error
argument at desk scale: it enumerates hash seeds and error patterns and
checks the averaged decoding error of the part-restricted minimum-distance
decoder against the analytic exponent, raising on any violation.

All logarithms are base 2; information is in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import BoundViolation, CapacityError
from .gf2 import BitMatrix, BitVector, kernel_basis, mat_vec_mul, rank, span_ints
from .hashing import build_toeplitz


def hbar(x: float) -> float:
    """Binary entropy clamped to 1 above x = 1/2."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"argument {x} outside [0, 1]")
    if x > 0.5:
        return 1.0
    if x == 0.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def binary_entropy(x: float) -> float:
    """Unclamped binary entropy (0 log 0 := 0)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"argument {x} outside [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def eve_info_bound(p_ph: float, l: int) -> float:
    """Upper bound hbar(P) + l P on Eve's information in bits."""
    if not 0.0 <= p_ph <= 1.0:
        raise ValueError("phase error probability outside [0, 1]")
    return hbar(p_ph) + l * p_ph


def distinguishability_bounds(p_ph: float) -> tuple[float, float, float, float]:
    """(pair fidelity lb, pair trace-norm ub, avg fidelity lb, avg trace-norm ub).

    Trace norms clamp to [0, 2] and fidelity lower bounds to [0, 1]; the
    clamped values remain valid bounds.
    """
    if not 0.0 <= p_ph <= 1.0:
        raise ValueError("phase error probability outside [0, 1]")
    fid_pair = min(1.0, max(0.0, 1.0 - 2.0 * p_ph))
    tn_pair = min(2.0, 4.0 * p_ph)
    fid_avg = min(1.0, max(0.0, 1.0 - p_ph))
    tn_avg = min(2.0, 2.0 * p_ph)
    return fid_pair, tn_pair, fid_avg, tn_avg


def success_bound(p_ph: float, l: int) -> float:
    """Upper bound on Eve's probability of guessing the l-bit key."""
    if not 0.0 <= p_ph <= 1.0:
        raise ValueError("phase error probability outside [0, 1]")
    if l < 1:
        raise ValueError("key length must be >= 1")
    c = 2.0 ** (-l)
    return (math.sqrt(p_ph) * math.sqrt(1.0 - c)
            + math.sqrt(1.0 - p_ph) * math.sqrt(c)) ** 2


def min_decoding_bound(k1: int, k2: int, t: int, m: int) -> float:
    """min{2^(K1 hbar(t/K1) + K2 - m), 1} for a fixed phase-error count t."""
    if k1 < 0 or k2 < 0 or m < 0:
        raise ValueError("counts must be non-negative")
    if t < 0 or t > k1:
        raise ValueError(f"t={t} outside [0, K1={k1}]")
    exponent = (k1 * hbar(t / k1) if k1 > 0 else 0.0) + k2 - m
    if exponent >= 0.0:
        return 1.0
    return 2.0 ** exponent


@dataclass
class BoundInputs:
    """Classification counts plus the privacy-amplification parameters.

    ``t_distribution`` maps the phase-error count t (0..J1) to its
    probability; bounds that average over t require it.
    """

    j0: int = 0
    j1: int = 0
    j2: int = 0
    j3: int = 0
    j4: int = 0
    j5: int = 0
    m: int = 0
    l: int = 0
    n_bar: int | None = None
    n_under: int | None = None
    t_distribution: Mapping[int, float] | None = None

    def validated_t_distribution(self) -> dict[int, float]:
        if self.t_distribution is None:
            raise ValueError("t_distribution required")
        dist = {int(t): float(p) for t, p in self.t_distribution.items()}
        if any(p < 0 for p in dist.values()):
            raise ValueError("negative probability in t_distribution")
        if abs(sum(dist.values()) - 1.0) > 1e-9:
            raise ValueError("t_distribution does not sum to 1")
        for t in dist:
            if not 0 <= t <= self.j1:
                raise ValueError(f"t={t} outside [0, J1={self.j1}]")
        return dist


def _averaged_bound(inputs: BoundInputs, k2: int) -> float:
    dist = inputs.validated_t_distribution()
    return sum(p * min_decoding_bound(inputs.j1, k2, t, inputs.m)
               for t, p in dist.items())


def forward_bound(inputs: BoundInputs) -> float:
    """Averaged phase-error bound for forward error correction."""
    return _averaged_bound(inputs, inputs.j2 + inputs.j4 + inputs.j5)


def reverse_bound(inputs: BoundInputs) -> float:
    """Averaged phase-error bound for reverse error correction."""
    return _averaged_bound(inputs, inputs.j0 + inputs.j2)


def twoway_bound(inputs: BoundInputs) -> float:
    """Averaged phase-error bound valid for any two-way error correction.

    Depends only on the t-marginal, so mixing over adaptively chosen codes
    leaves the value unchanged.
    """
    return _averaged_bound(inputs, inputs.j0 + inputs.j2 + inputs.j4 + inputs.j5)


def averaged_eve_info_bound(p_av: float, n_bar: int) -> float:
    """Bound P_av (N_bar + 1 - log2 P_av) on Eve's averaged information."""
    if not 0.0 <= p_av <= 1.0:
        raise ValueError("averaged probability outside [0, 1]")
    if p_av == 0.0:
        return 0.0
    return p_av * (n_bar + 1.0 - math.log2(p_av))


def averaged_success_bound(p_av: float, n_under: int) -> float:
    """Guessing bound evaluated at the minimum key size N_under."""
    return success_bound(p_av, n_under)


def per_bit_eve_info_bound(p_av: float, n_under: int) -> float:
    """Per-key-bit information bound hbar(P_av)/N_under + P_av."""
    if n_under < 1:
        raise ValueError("minimum key size must be >= 1")
    if not 0.0 <= p_av <= 1.0:
        raise ValueError("averaged probability outside [0, 1]")
    return hbar(p_av) / n_under + p_av


def max_bound_over_inputs(candidates: Iterable[BoundInputs],
                          kind: str = "forward") -> tuple[float, BoundInputs]:
    """Maximize one of the averaged bounds over adversarial strategies.

    The averaged bounds are linear in the conditional error distribution,
    so their worst case sits at deterministic (extremal) strategies; callers
    supply those as explicit BoundInputs candidates.
    """
    fn = {"forward": forward_bound, "reverse": reverse_bound,
          "twoway": twoway_bound}[kind]
    best = None
    best_inputs = None
    for cand in candidates:
        val = fn(cand)
        if best is None or val > best:
            best, best_inputs = val, cand
    if best is None:
        raise ValueError("no candidate strategies supplied")
    return best, best_inputs


def worst_case_t_bound(j1: int, k2: int, m: int) -> float:
    """Maximum of the fixed-t bound over all t in [0, J1] (grid search)."""
    return max(min_decoding_bound(j1, k2, t, m) for t in range(j1 + 1))


# ----------------------------------------------------------------------
# Desk-scale verification of the decoding-error proposition.


@dataclass(frozen=True)
class DecodingCheck:
    """Result of one decoding-error verification run."""

    empirical_mean: float     # avg over weight<=t part-1 patterns, worst part-2
    empirical_max: float      # worst pattern overall (still seed-averaged)
    bound: float
    n_seeds: int
    n_patterns: int


def _random_full_rank(rng: np.random.Generator, rows: int, cols: int) -> BitMatrix:
    while True:
        mat = BitMatrix.from_rows(rng.integers(0, 2, size=(rows, cols)).tolist())
        if rank(mat) == cols:
            return mat


def _weight_limited_patterns(n_bits: int, max_w: int, offset: int) -> list[int]:
    out = []
    for v in range(1 << n_bits):
        if v.bit_count() <= max_w:
            out.append(v << offset)
    return out


def verify_proposition_decoding(n0: int, n1: int, n2: int, t: int,
                                c1_dim: int, m: int,
                                rng: np.random.Generator | None = None,
                                max_seeds: int = 8192,
                                guard_n: int = 14) -> DecodingCheck:
    """Replay the decoding-error bound 2^(n1 hbar(t/n1) + n2 - m) exactly.

    Coordinates are split into a noiseless part (n0 bits), a part with at
    most t flips (n1 bits) and an unconstrained part (n2 bits).  For every
    hash seed the m-dimensional subcode is derived from a Toeplitz matrix;
    the decoder pins the part-0 bits and minimizes weight on part 1 over
    the dual subcode.  The seed-averaged failure rate is computed for every
    error pattern; a BoundViolation is raised if any pattern beats the
    analytic bound.
    """
    n = n0 + n1 + n2
    if n > guard_n:
        raise CapacityError(f"N={n} exceeds guard {guard_n}")
    if not 0 <= t <= n1:
        raise ValueError("need 0 <= t <= n1")
    if not 1 <= m <= c1_dim <= n:
        raise ValueError("need 1 <= m <= c1_dim <= N")
    l = c1_dim - m
    if l < 1:
        raise ValueError("c1_dim - m must be >= 1")
    rng = rng or np.random.default_rng(0)

    m_e = _random_full_rank(rng, n, c1_dim)
    c1perp = set(span_ints([v.bits for v in kernel_basis(m_e.transpose())]))

    n_seed_bits = c1_dim - 1
    if (1 << n_seed_bits) <= max_seeds:
        seeds = range(1 << n_seed_bits)
    else:
        seeds = [int(s) for s in
                 rng.integers(0, 1 << n_seed_bits, size=max_seeds)]

    mask1 = ((1 << n1) - 1) << n0
    part1 = _weight_limited_patterns(n1, t, n0)
    part2 = [v << (n0 + n1) for v in range(1 << n2)]
    ys = np.array([e1 | e2 for e2 in part2 for e1 in part1], dtype=np.uint64)

    fail_sum = np.zeros(len(ys))
    n_seeds = 0
    for seed_bits in seeds:
        hash_m = build_toeplitz(l, m, BitVector(c1_dim - 1, seed_bits))
        sub_rows = tuple(mat_vec_mul(m_e, u).bits for u in kernel_basis(hash_m))
        c2perp = span_ints(
            [v.bits for v in kernel_basis(BitMatrix(len(sub_rows), n, sub_rows))])
        # Decoder candidates: dual-subcode words with part-0 coordinates zero.
        cand = [w for w in c2perp if w & ((1 << n0) - 1) == 0]
        cand_arr = np.array(cand, dtype=np.uint64)
        order = _lex_order(cand_arr, n)
        cand_arr = cand_arr[order]
        good = np.array([1 if int(w) in c1perp else 0 for w in cand_arr],
                        dtype=np.uint8)
        fail_sum += kernels.restricted_decode_flags(cand_arr, good, mask1, ys)
        n_seeds += 1

    fail_rate = fail_sum / n_seeds
    bound = 2.0 ** ((n1 * hbar(t / n1) if n1 else 0.0) + n2 - m)

    per_pattern = fail_rate.reshape(len(part2), len(part1))
    empirical_mean = float(per_pattern.mean(axis=1).max())
    empirical_max = float(fail_rate.max())
    if empirical_max > bound + 1e-12:
        raise BoundViolation(
            f"decoding failure {empirical_max} exceeds bound {bound}")
    return DecodingCheck(empirical_mean, empirical_max, bound,
                         n_seeds, len(ys))


def _lex_order(words: np.ndarray, n_bits: int) -> np.ndarray:
    keys = np.zeros(len(words), dtype=np.uint64)
    for i in range(n_bits):
        keys = (keys << np.uint64(1)) | ((words >> np.uint64(i)) & np.uint64(1))
    return np.argsort(keys, kind="stable")

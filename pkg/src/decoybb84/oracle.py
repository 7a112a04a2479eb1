"""Exact computation of Eve's post-protocol figures of merit at desk scale.

For an l-bit logical Pauli channel with joint error law P(x, z) (x the key
flips, z the phase flips), Eve's state for final key y decomposes into
blocks labeled by x, each block a pure state with amplitudes
``(-1)^(z.y) sqrt(P(z|x))``.  Everything worth knowing about Eve follows
from that block structure:

* her information equals the conditional phase entropy  sum_x P(x) H(Z|x),
* pairwise fidelity/trace norm between per-key states reduce to the block
  inner products  sum_z (-1)^(z.d) P(z|x),
* the optimal key-guessing probability is the covariant-measurement value
  sum_x P(x) (sum_z sqrt(P(z|x)) sqrt(2^-l))^2.

A dense density-matrix path (dimension 4^l) exists purely as a
cross-check for small l.  ``reduce_code_channel`` grinds an N-qubit
channel plus a code pair (error-correction generator, hash matrix) down to
this logical level by exhaustive minimum-distance decoding, and also
reports the exact phase-error probability of that decoder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import kernels
from .errors import CapacityError, DimensionMismatch
from .gf2 import BitMatrix, _eliminate, kernel_basis, mat_vec_mul, rank, span_ints

ORACLE_GUARD_L = 4
REDUCE_GUARD_N = 12
_SUM_TOL = 1e-12


@dataclass(frozen=True)
class PauliErrorDistribution:
    """Joint distribution over (bit-flip, phase-flip) patterns on l bits."""

    l: int
    probs: np.ndarray  # shape (2^l, 2^l), probs[x, z]

    def __post_init__(self):
        if self.l < 1:
            raise ValueError("l must be >= 1")
        if self.l > ORACLE_GUARD_L:
            raise CapacityError(f"l={self.l} exceeds oracle guard {ORACLE_GUARD_L}")
        p = np.asarray(self.probs, dtype=np.float64)
        if p.shape != (1 << self.l, 1 << self.l):
            raise DimensionMismatch(f"probs must have shape (2^l, 2^l), got {p.shape}")
        if (p < -1e-15).any():
            raise ValueError("negative probability")
        if abs(p.sum() - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {p.sum()}, not 1")
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_dict(cls, l: int, entries: Mapping[tuple[int, int], float]) -> "PauliErrorDistribution":
        p = np.zeros((1 << l, 1 << l))
        for (x, z), v in entries.items():
            p[x, z] = v
        return cls(l, p)

    def x_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def conditional_phase(self) -> np.ndarray:
        """P(z|x) rows; rows with P(x)=0 are left as zeros."""
        px = self.x_marginal()
        cond = np.zeros_like(self.probs)
        nz = px > 0
        cond[nz] = self.probs[nz] / px[nz, None]
        return cond


@dataclass(frozen=True)
class EveFigures:
    """Exact figures of merit for one logical error distribution."""

    mutual_info_bits: float
    min_pair_fidelity: float
    max_pair_trace_norm: float
    min_avg_fidelity: float
    max_avg_trace_norm: float
    opt_success_prob: float
    phase_error_prob: float


def phase_error_probability(dist: PauliErrorDistribution) -> float:
    """Total probability of a nonzero phase-flip pattern."""
    return float(1.0 - dist.probs[:, 0].sum())


def _entropy_bits(p: np.ndarray) -> float:
    nz = p > 0
    return float(-(p[nz] * np.log2(p[nz])).sum())


def eve_mutual_information(dist: PauliErrorDistribution) -> float:
    """Eve's information about the final key in bits.

    Each x-block of Eve's per-key state is pure while the same block of the
    key-averaged state is diagonal with the conditional phase probabilities,
    so the average relative entropy collapses to sum_x P(x) H(Z | X = x).
    The dense-matrix path cross-checks this closed form for small l.
    """
    px = dist.x_marginal()
    cond = dist.conditional_phase()
    total = 0.0
    for x in range(1 << dist.l):
        if px[x] > 0:
            total += px[x] * _entropy_bits(cond[x])
    return total


def _sign_matrix(l: int) -> np.ndarray:
    """S[d, z] = (-1)^(popcount(d & z)), the parity character table."""
    idx = np.arange(1 << l, dtype=np.uint64)
    par = kernels.popcount64_numpy(idx[:, None] & idx[None, :]) & 1
    return 1.0 - 2.0 * par


def optimal_success_probability(dist: PauliErrorDistribution) -> float:
    """Eve's best key-guessing probability (covariant measurement value)."""
    px = dist.x_marginal()
    cond = dist.conditional_phase()
    amp = np.sqrt(cond).sum(axis=1)
    return float((px * amp ** 2).sum() * 2.0 ** (-dist.l))


def pairwise_figures(dist: PauliErrorDistribution) -> EveFigures:
    """All exact Eve figures, computed from the block structure.

    The per-key states are conjugate to each other under diagonal sign
    unitaries, so pairwise quantities depend only on the key difference d
    and the against-average quantities do not depend on the key at all.
    """
    l = dist.l
    px = dist.x_marginal()
    cond = dist.conditional_phase()
    signs = _sign_matrix(l)
    # inner[x, d] = sum_z (-1)^(z.d) P(z|x)
    inner = cond @ signs.T

    min_pair_fid = 1.0
    max_pair_tn = 0.0
    for d in range(1, 1 << l):
        w = inner[:, d]
        fid = float((px * np.abs(w)).sum())
        tn = float((px * 2.0 * np.sqrt(np.maximum(0.0, 1.0 - w ** 2))).sum())
        min_pair_fid = min(min_pair_fid, fid)
        max_pair_tn = max(max_pair_tn, tn)
    if l == 0:  # pragma: no cover - l >= 1 enforced
        min_pair_fid, max_pair_tn = 1.0, 0.0

    avg_fid = float((px * np.sqrt((cond ** 2).sum(axis=1))).sum())

    avg_tn = 0.0
    for x in range(1 << l):
        if px[x] == 0:
            continue
        s = np.sqrt(cond[x])
        block = np.outer(s, s) - np.diag(cond[x])
        avg_tn += px[x] * float(np.abs(np.linalg.eigvalsh(block)).sum())

    return EveFigures(
        mutual_info_bits=eve_mutual_information(dist),
        min_pair_fidelity=min_pair_fid,
        max_pair_trace_norm=max_pair_tn,
        min_avg_fidelity=avg_fid,
        max_avg_trace_norm=avg_tn,
        opt_success_prob=optimal_success_probability(dist),
        phase_error_prob=phase_error_probability(dist),
    )


# ----------------------------------------------------------------------
# Dense density-matrix cross-check path (dimension 4^l; l <= 2 intended).


def dense_eve_state(dist: PauliErrorDistribution, y: int) -> np.ndarray:
    """Eve's full density matrix for final key y, basis index x*2^l + z."""
    l = dist.l
    dim = 1 << (2 * l)
    rho = np.zeros((dim, dim))
    cond = dist.conditional_phase()
    px = dist.x_marginal()
    for x in range(1 << l):
        if px[x] == 0:
            continue
        amps = np.array([
            (-1.0) ** ((z & y).bit_count()) * math.sqrt(cond[x, z])
            for z in range(1 << l)
        ])
        base = x << l
        rho[base:base + (1 << l), base:base + (1 << l)] += px[x] * np.outer(amps, amps)
    return rho


def dense_average_state(dist: PauliErrorDistribution) -> np.ndarray:
    """Key-averaged Eve state: diagonal with entries P(x, z)."""
    return np.diag(dist.probs.ravel())


def quantum_relative_entropy_bits(rho: np.ndarray, sigma: np.ndarray,
                                  tol: float = 1e-12) -> float:
    """D(rho || sigma) in bits for Hermitian PSD matrices, supp rho <= supp sigma."""
    lam_r, vec_r = np.linalg.eigh(rho)
    lam_s, vec_s = np.linalg.eigh(sigma)
    term_r = float((lam_r[lam_r > tol] * np.log2(lam_r[lam_r > tol])).sum())
    term_s = 0.0
    for i, lam in enumerate(lam_s):
        if lam > tol:
            v = vec_s[:, i]
            term_s += float(v @ rho @ v) * math.log2(lam)
    return term_r - term_s


def dense_mutual_information(dist: PauliErrorDistribution) -> float:
    """Average over keys of D(rho_E(y) || rho_bar), the direct definition."""
    rho_bar = dense_average_state(dist)
    total = 0.0
    n = 1 << dist.l
    for y in range(n):
        total += quantum_relative_entropy_bits(dense_eve_state(dist, y), rho_bar)
    return total / n


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    lam, vec = np.linalg.eigh(a)
    lam = np.clip(lam, 0.0, None)
    return (vec * np.sqrt(lam)) @ vec.T


def dense_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Tr sqrt(sqrt(b) a sqrt(b)) for PSD a, b."""
    rb = _psd_sqrt(b)
    lam = np.linalg.eigvalsh(rb @ a @ rb)
    return float(np.sqrt(np.clip(lam, 0.0, None)).sum())


def dense_trace_norm(a: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(a)).sum())


# ----------------------------------------------------------------------
# Reduction from an N-qubit channel and a code pair to the logical level.


def _column_masks(m: BitMatrix) -> list[int]:
    cols = [0] * m.cols
    for i, row in enumerate(m.row_bits):
        for j in range(m.cols):
            cols[j] |= ((row >> j) & 1) << i
    return cols


def _enumerate_image_with_labels(m_e: BitMatrix, m_p: BitMatrix) -> tuple[np.ndarray, np.ndarray]:
    """All codewords M_e Z with their key labels M_p Z, Gray-code walk over Z."""
    ncode = 1 << m_e.cols
    cols_e = _column_masks(m_e)
    cols_p = _column_masks(m_p)
    words = np.zeros(ncode, dtype=np.uint64)
    labels = np.zeros(ncode, dtype=np.uint32)
    w = 0
    lab = 0
    for i in range(1, ncode):
        bit = (i & -i).bit_length() - 1
        w ^= cols_e[bit]
        lab ^= cols_p[bit]
        words[i] = w
        labels[i] = lab
    return words, labels


def _lex_sort(words: np.ndarray, n_bits: int) -> np.ndarray:
    keys = np.zeros(len(words), dtype=np.uint64)
    for i in range(n_bits):
        keys = (keys << np.uint64(1)) | ((words >> np.uint64(i)) & np.uint64(1))
    return np.argsort(keys, kind="stable")


def _normalize_channel(channel, n: int) -> tuple[str, object]:
    """Accept a per-position symbol law or an explicit joint pattern law."""
    if isinstance(channel, Mapping):
        total = sum(channel.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"explicit channel law sums to {total}")
        return "joint", channel
    site_laws = []
    for i, law in enumerate(channel):
        mat = np.zeros((2, 2))
        for (x, z), p in law.items():
            mat[x, z] = p
        if abs(mat.sum() - 1.0) > 1e-9:
            raise ValueError(f"site {i} law sums to {mat.sum()}")
        site_laws.append(mat)
    if len(site_laws) != n:
        raise DimensionMismatch(f"channel has {len(site_laws)} sites, code expects {n}")
    return "product", site_laws


def reduce_code_channel(channel, m_e: BitMatrix, m_p: BitMatrix,
                        guard_n: int = REDUCE_GUARD_N):
    """Reduce an N-qubit Pauli channel through a code pair to l logical bits.

    Args:
        channel: either a length-N sequence of per-site laws
            ``{(x, z): prob}`` (independent sites) or an explicit joint law
            ``{(x_pattern, z_pattern): prob}`` over packed N-bit patterns.
        m_e: N x (l+m) injective generator of the error-correction code.
        m_p: l x (l+m) hash matrix of full row rank.

    Returns:
        (logical distribution, phase-error probability of minimum-distance
        decoding on the dual code pair).  Key errors are decoded in the
        image of ``m_e`` and phase errors in the dual pair
        ``(image of m_e . ker m_p)^perp / (image of m_e)^perp``; both decoders
        average over the transmitted word so tie-breaking is honest.
    """
    n = m_e.rows
    lm = m_e.cols
    l = m_p.rows
    if m_p.cols != lm:
        raise DimensionMismatch("m_p columns must equal m_e columns")
    if n > guard_n:
        raise CapacityError(f"N={n} exceeds reduction guard {guard_n}")
    if rank(m_e) != lm:
        raise ValueError("m_e must be injective (full column rank)")
    if rank(m_p) != l:
        raise ValueError("m_p must have full row rank")
    m = lm - l

    kind, law = _normalize_channel(channel, n)

    # --- key-error side: code Im(m_e), labels M_p Z ------------------
    words, labels = _enumerate_image_with_labels(m_e, m_p)
    order = _lex_sort(words, n)
    words, labels = words[order], labels[order]
    dx = kernels.decode_table(words, n)

    # --- phase-error side: dual pair -------------------------------
    c1perp = kernel_basis(m_e.transpose())       # (Im m_e)^perp
    ker_p = kernel_basis(m_p)                    # dim m
    sub_rows = tuple(mat_vec_mul(m_e, u).bits for u in ker_p)
    c2perp_basis = kernel_basis(BitMatrix(len(sub_rows), n, sub_rows))
    c1_ints = span_ints([v.bits for v in c1perp])

    # Complete the C1perp basis to a C2perp basis; the added generators
    # carry the l logical phase labels.
    chosen: list[int] = []
    base_rows = [v.bits for v in c1perp]
    cur_rank = len(_eliminate(base_rows, n)[1])
    for v in span_ints([b.bits for b in c2perp_basis]):
        if len(chosen) == l:
            break
        cand_rows = base_rows + chosen + [v]
        r = len(_eliminate(cand_rows, n)[1])
        if r == cur_rank + 1:
            chosen.append(v)
            cur_rank = r
    if len(chosen) != l:
        raise ValueError("code pair does not expose l logical phase bits")

    z_words = np.empty(len(c1_ints) << l, dtype=np.uint64)
    z_labels = np.empty(len(c1_ints) << l, dtype=np.uint32)
    rep_span = span_ints(chosen)
    for lbl, rep in enumerate(rep_span):
        base = lbl * len(c1_ints)
        for i, c in enumerate(c1_ints):
            z_words[base + i] = c ^ rep
            z_labels[base + i] = lbl
    order = _lex_sort(z_words, n)
    z_words, z_labels = z_words[order], z_labels[order]
    dz = kernels.decode_table(z_words, n)

    # --- averaged label-transition tables ---------------------------
    size = 1 << n
    n_lab = 1 << l
    es = np.arange(size, dtype=np.int64)
    base_idx = es * n_lab
    dec_lbl_x = labels[dx].astype(np.int64)
    ax_flat = np.zeros(size * n_lab)
    for i in range(len(words)):
        lbls = dec_lbl_x[es ^ int(words[i])] ^ int(labels[i])
        ax_flat += np.bincount(base_idx + lbls, minlength=size * n_lab)
    ax = ax_flat.reshape(size, n_lab) / len(words)

    dec_lbl_z = z_labels[dz].astype(np.int64)
    az_flat = np.zeros(size * n_lab)
    for c in c1_ints:
        lbls = dec_lbl_z[es ^ c]
        az_flat += np.bincount(base_idx + lbls, minlength=size * n_lab)
    az = az_flat.reshape(size, n_lab) / len(c1_ints)

    # --- joint pattern law ------------------------------------------
    if kind == "product":
        joint = np.array([[1.0]])
        for site in law:
            joint = np.kron(site, joint)
        p_z = joint.sum(axis=0)
        logical = ax.T @ joint @ az
    else:
        p_z = np.zeros(size)
        logical = np.zeros((1 << l, 1 << l))
        for (ex, ez), p in law.items():
            p_z[ez] += p
            logical += p * np.outer(ax[ex], az[ez])

    p_ph_min = float((p_z * (1.0 - az[:, 0])).sum())
    logical = np.clip(logical, 0.0, None)
    logical /= logical.sum()
    return PauliErrorDistribution(l, logical), p_ph_min

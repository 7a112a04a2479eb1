"""Seeded end-to-end simulation of the decoy-state BB84 session.

One session walks the ten protocol steps: pulse-kind assignment over the
2k+1 kinds (vacuum decoy, then the k source distributions in the x basis,
then the same k in the + basis), transmission through a channel strategy,
public announcements, check-bit sampling with both abort conditions,
error-correction-rate and sacrifice-bit decisions (with the max/min key
size clamps), then error correction and Toeplitz privacy amplification for
each basis.  Everything is driven by one numpy Generator seeded from the
config, so a session is a pure function of (config, strategy, seed): the
transcript of announcements is byte-identical across runs.

Conventions the protocol text leaves open (documented assumptions):

* the receiver measures each detected pulse in a uniformly random basis,
* non-integer key-length products are floored,
* check-bit positions are drawn uniformly without replacement among the
  common-basis pulses of the raw-key kinds,
* the vacuum decoy (kind 0) is a true vacuum with no basis, and its
  counting rate estimates the dark-count-inclusive vacuum rate,
* detector/generator errors flip single- and multi-photon bits at the
  calibrated per-basis rates; dark and spurious counts are already uniform,
* measurement works at the reduced three-outcome level (no click / 0 / 1);
  double-click resolution by a fair coin is absorbed into the strategy's
  error rates.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import kernels
from .bounds import hbar
from .channel import (ChannelStrategy, ClassCounts, DARK, MULTI, NORMAL,
                      PulseLabel, SINGLE, VACUUM, classify)
from .decoy import (ObservedRates, SourceDistribution,
                    estimate_interval_symmetric, estimate_vacuum_single)
from .errors import CapacityError, DimensionMismatch, SessionAborted
from .gf2 import BitMatrix, BitVector, mat_vec_mul, rank, solve
from .hashing import sample_seed
from .rates import shannon_eta

PLUS, TIMES = 0, 1


@dataclass(frozen=True)
class DInitial:
    """Initial data: pulse-kind counts, source laws, detector calibration."""

    a: tuple[int, ...]
    nus: tuple[SourceDistribution, ...]
    p_s: float
    p_dark: float


@dataclass(frozen=True)
class DExperimental:
    """Experimental data: detected / common-basis / error counts per kind."""

    c: tuple[int, ...]
    e: tuple[int, ...]
    h: tuple[int, ...]


@dataclass
class SessionConfig:
    n: int
    n_bar: int
    n_under: int
    n_prime: int
    nus: tuple[SourceDistribution, ...]
    i0: int
    p_bar: tuple[float, ...]
    p_s: float = 0.0
    p_s_tilde: float = 0.0
    eta: Callable[[float], float] = shannon_eta
    m_rule: "Callable | str" = "initial-eve-info"
    margin_bits: int = 0
    ec_direction: str = "forward"
    rng_seed: int = 0
    decode_guard: int = 1 << 20
    record_transcript: bool = True

    def __post_init__(self):
        k = len(self.nus)
        if k < 1:
            raise ValueError("need at least one source distribution")
        if len(self.p_bar) != 2 * k + 1:
            raise ValueError(f"p_bar must have 2k+1 = {2 * k + 1} entries")
        if abs(sum(self.p_bar) - 1.0) > 1e-9:
            raise ValueError("kind probabilities must sum to 1")
        if not 1 <= self.i0 <= k:
            raise ValueError("i0 must index one of the k distributions")
        if not self.n < self.n_prime:
            raise ValueError("need N < N'")
        if not 1 <= self.n_under <= self.n_bar <= self.n:
            raise ValueError("need 1 <= N_under <= N_bar <= N")
        if self.ec_direction not in ("forward", "reverse"):
            raise ValueError("ec_direction must be 'forward' or 'reverse'")

    @property
    def k(self) -> int:
        return len(self.nus)


@dataclass
class BasisResult:
    """Per-basis outcome of steps 6-10."""

    observed_error: float
    lm: int
    m: int
    length: int
    alice_key: BitVector | None = None
    bob_key: BitVector | None = None
    ec_success: bool = False
    m_clamped: bool = False


@dataclass
class SessionOutcome:
    status: str                        # "completed" or "aborted"
    abort_step: int | None
    abort_reason: str | None
    plus: BasisResult | None
    times: BasisResult | None
    experiment: DExperimental | None
    transcript: tuple[str, ...]
    truth: dict
    bounds_report: dict
    config: SessionConfig
    initial: DInitial | None = None
    initial_tilde: DInitial | None = None

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    def keys_match(self) -> bool:
        return (self.completed
                and self.plus.alice_key == self.plus.bob_key
                and self.times.alice_key == self.times.bob_key)


def _hexbits(bits: np.ndarray) -> str:
    return np.packbits(bits.astype(np.uint8)).tobytes().hex()


def _bv_from_array(bits: np.ndarray) -> BitVector:
    value = 0
    for i, b in enumerate(bits):
        value |= int(b) << i
    return BitVector(len(bits), value)


def random_full_rank_matrix(rng: np.random.Generator, rows: int, cols: int) -> BitMatrix:
    """Uniform binary matrix conditioned on full column rank."""
    if cols > rows:
        raise DimensionMismatch("need cols <= rows for an injective generator")
    while True:
        mat = BitMatrix.from_rows(rng.integers(0, 2, size=(rows, cols)).tolist())
        if rank(mat) == cols:
            return mat


def _enumerate_codewords(m_e: BitMatrix) -> tuple[np.ndarray, np.ndarray]:
    """All codewords M_e z as packed ints plus the generating z, lex-sorted."""
    cols = [0] * m_e.cols
    for i, row in enumerate(m_e.row_bits):
        for j in range(m_e.cols):
            cols[j] |= ((row >> j) & 1) << i
    ncode = 1 << m_e.cols
    words = np.zeros(ncode, dtype=np.uint64)
    w = 0
    for i in range(1, ncode):
        w ^= cols[(i & -i).bit_length() - 1]
        words[i] = w
    zs_gray = np.arange(ncode, dtype=np.uint64)
    zs_gray ^= zs_gray >> np.uint64(1)
    keys = np.zeros(ncode, dtype=np.uint64)
    for i in range(m_e.rows):
        keys = (keys << np.uint64(1)) | ((words >> np.uint64(i)) & np.uint64(1))
    order = np.argsort(keys, kind="stable")
    return words[order], zs_gray[order]


def decode_to_seed(m_e: BitMatrix, received: BitVector,
                   guard: int = 1 << 20) -> BitVector:
    """Recover z from a noisy M_e z by minimum-distance decoding.

    Fast path: an exact preimage exists (no residual error).  Otherwise the
    code is enumerated exhaustively up to the guard.
    """
    exact = solve(m_e, received)
    if exact is not None:
        return exact
    if 1 << m_e.cols > guard:
        raise CapacityError(
            f"exhaustive decode of 2^{m_e.cols} codewords exceeds guard {guard}")
    words, zs = _enumerate_codewords(m_e)
    idx = kernels.nearest_index(words, received.bits)
    return BitVector(m_e.cols, int(zs[idx]))


def forward_error_correct(x_alice: BitVector, x_bob: BitVector, m_e: BitMatrix,
                          rng: np.random.Generator,
                          guard: int = 1 << 20) -> tuple[BitVector, BitVector, bool]:
    """Alice masks a fresh seed with her raw key; Bob unmasks and decodes."""
    if x_alice.length != m_e.rows or x_bob.length != m_e.rows:
        raise DimensionMismatch("raw keys must match the code length")
    z = _bv_from_array(rng.integers(0, 2, size=m_e.cols))
    sent = mat_vec_xor(m_e, z, x_alice)
    noisy_codeword = BitVector(m_e.rows, sent.bits ^ x_bob.bits)  # M_e z + e
    z_bob = decode_to_seed(m_e, noisy_codeword, guard)
    return z, z_bob, z_bob == z


def reverse_error_correct(x_alice: BitVector, x_bob: BitVector, m_e: BitMatrix,
                          rng: np.random.Generator,
                          guard: int = 1 << 20) -> tuple[BitVector, BitVector, bool]:
    """Mirror image: Bob masks his seed; Alice decodes."""
    z, z_alice, ok = forward_error_correct(x_bob, x_alice, m_e, rng, guard)
    return z_alice, z, ok


def mat_vec_xor(m_e: BitMatrix, z: BitVector, x: BitVector) -> BitVector:
    return BitVector(x.length, mat_vec_mul(m_e, z).bits ^ x.bits)


# ----------------------------------------------------------------------
# Sacrifice-bit rules.


def constant_m_rule(m_value: int) -> Callable:
    def rule(cfg, d_init, d_e, basis, lm):
        return m_value
    return rule


def initial_eve_info_m_rule(cfg: SessionConfig, d_init: DInitial,
                            d_e: DExperimental, basis: str, lm: int) -> int:
    """Default placeholder rule: the initial-Eve-information estimate.

    Phase errors of one basis are bit errors of the conjugate basis, so the
    single-photon yield and phase-error rate are estimated from the
    conjugate raw-key kind (with the detector calibration carried by the
    initial data), then fed into
    N (1 - nu1 q1 (1 - hbar(r1)) / p - credit / p) plus a margin knob.
    A finite-sample statistical treatment is out of scope here.
    """
    k = cfg.k
    key_kind = cfg.i0 + k if basis == "plus" else cfg.i0
    conj_kind = cfg.i0 if basis == "plus" else cfg.i0 + k
    nu = cfg.nus[cfg.i0 - 1]
    a0, c0 = d_init.a[0], d_e.c[0]
    p0_hat = c0 / a0 if a0 > 0 else d_init.p_dark
    p_key = d_e.c[key_kind] / d_init.a[key_kind] if d_init.a[key_kind] else 0.0
    p_conj = d_e.c[conj_kind] / d_init.a[conj_kind] if d_init.a[conj_kind] else 0.0
    n_check = d_e.e[conj_kind] - cfg.n
    s_conj = d_e.h[conj_kind] / n_check if n_check > 0 else 1.0
    p_key = max(p_key, 1e-12)
    obs = ObservedRates(p0=p0_hat, p_dark=d_init.p_dark,
                        p_nu_times=max(p_conj, 1e-12),
                        s_nu_times=min(1.0, s_conj), p_s=d_init.p_s)
    try:
        if nu.v2 == 0.0:
            q1e, r1e = estimate_vacuum_single(nu, obs)
            q1, r1 = q1e.value, r1e.value
        else:
            interval = estimate_interval_symmetric(nu, obs)
            q1, r1 = interval.q1_min, interval.r1_max
    except Exception:
        q1, r1 = 0.0, 1.0
    photon = nu.v1 * q1 * (1.0 - hbar(r1)) / p_key
    if cfg.ec_direction == "forward":
        credit = nu.v0 * p0_hat / p_key
    else:
        credit = d_init.p_dark / p_key
    m_est = cfg.n * (1.0 - photon - credit)
    return max(0, min(lm, math.ceil(m_est) + cfg.margin_bits))


def _resolve_m_rule(cfg: SessionConfig) -> Callable:
    if callable(cfg.m_rule):
        return cfg.m_rule
    if cfg.m_rule == "initial-eve-info":
        return initial_eve_info_m_rule
    if isinstance(cfg.m_rule, str) and cfg.m_rule.startswith("constant:"):
        return constant_m_rule(int(cfg.m_rule.split(":", 1)[1]))
    raise ValueError(f"unknown m_rule {cfg.m_rule!r}")


# ----------------------------------------------------------------------
# The session.


def run_session(cfg: SessionConfig, strategy: ChannelStrategy) -> SessionOutcome:
    rng = np.random.default_rng(cfg.rng_seed)
    k = cfg.k
    n_kinds = 2 * k + 1
    i0x = cfg.i0            # raw-key kind, x basis
    i0p = cfg.i0 + k        # raw-key kind, + basis

    transcript: list[str] = []

    def announce(step: int, who: str, what: str):
        if cfg.record_transcript:
            transcript.append(f"{step} {who} {what}")

    # Step 1: Alice draws kinds and photon classes; nothing is public yet.
    kinds = rng.choice(n_kinds, size=cfg.n_prime, p=np.asarray(cfg.p_bar))
    a_counts = np.bincount(kinds, minlength=n_kinds)
    cls = np.zeros(cfg.n_prime, dtype=np.int8)  # 0 vacuum, 1 single, 2 multi
    for kind in range(n_kinds):
        mask = kinds == kind
        if kind == 0 or not mask.any():
            continue
        nu = cfg.nus[(kind - 1) % k]
        cls[mask] = rng.choice(3, size=int(mask.sum()),
                               p=[nu.v0, nu.v1, nu.v2])
    basis_alice = np.where(kinds == 0, -1, np.where(kinds <= k, TIMES, PLUS))
    alice_bits = rng.integers(0, 2, size=cfg.n_prime, dtype=np.int8)

    # Channel: detection tags, then Bob's basis and measured bits.
    q_normal = np.empty(cfg.n_prime)
    for c, qv in ((0, strategy.q_vacuum), (1, strategy.q_single)):
        q_normal[cls == c] = qv
    mm = cls == 2
    q_normal[mm & (basis_alice == TIMES)] = strategy.q_multi_times
    q_normal[mm & (basis_alice == PLUS)] = strategy.q_multi_plus
    u = rng.random(cfg.n_prime)
    det = np.zeros(cfg.n_prime, dtype=np.int8)  # 0 undetected, 1 normal, 2 dark
    det[u < q_normal] = 1
    det[(u >= q_normal) & (u < q_normal + strategy.p_dark)] = 2
    detected = det > 0

    bob_basis = rng.integers(0, 2, size=cfg.n_prime, dtype=np.int8)  # 0 +, 1 x
    common = detected & (basis_alice >= 0) & (bob_basis == basis_alice)

    # Error symbols where the channel needs them.
    xflip = np.zeros(cfg.n_prime, dtype=np.int8)
    zflip = np.zeros(cfg.n_prime, dtype=np.int8)
    for b, law in ((PLUS, strategy.single_error_plus),
                   (TIMES, strategy.single_error_times)):
        mask = (cls == 1) & (det == 1) & (basis_alice == b)
        cnt = int(mask.sum())
        if cnt:
            idx = rng.choice(4, size=cnt, p=np.asarray(law))
            xflip[mask] = idx >> 1
            zflip[mask] = idx & 1
    for b, pflip in ((PLUS, strategy.multi_flip_plus),
                     (TIMES, strategy.multi_flip_times)):
        mask = (cls == 2) & (det == 1) & (basis_alice == b)
        cnt = int(mask.sum())
        if cnt:
            xflip[mask] = (rng.random(cnt) < pflip).astype(np.int8)

    bob_bits = alice_bits.copy()
    bob_bits ^= xflip
    # Uniform outcomes: dark counts, spurious vacuum clicks, wrong-basis signal.
    uniform_mask = (det == 2) | ((det == 1) & (cls == 0)) | \
        ((det == 1) & (cls > 0) & (basis_alice >= 0) & (bob_basis != basis_alice))
    n_uniform = int(uniform_mask.sum())
    if n_uniform:
        bob_bits[uniform_mask] = rng.integers(0, 2, size=n_uniform, dtype=np.int8)
    # Detector/generator errors on signal bits, per measured basis.
    sig = (det == 1) & (cls > 0) & common
    ud = rng.random(cfg.n_prime)
    flip_det = sig & (((bob_basis == TIMES) & (ud < cfg.p_s))
                      | ((bob_basis == PLUS) & (ud < cfg.p_s_tilde)))
    bob_bits = bob_bits ^ flip_det.astype(np.int8)

    # Step 2: Alice announces the kinds.
    announce(2, "alice", "kinds " + ",".join(map(str, kinds.tolist())))

    # Step 3: Bob announces detections, common-basis positions, counts.
    c_counts = np.bincount(kinds[detected], minlength=n_kinds)
    e_counts = np.bincount(kinds[common], minlength=n_kinds)
    announce(3, "bob", "detected " + _hexbits(detected))
    announce(3, "bob", "common " + _hexbits(common))
    announce(3, "bob", "counts C=" + ",".join(map(str, c_counts.tolist()))
             + " E=" + ",".join(map(str, e_counts.tolist())))

    truth: dict = {}
    h_counts = np.zeros(n_kinds, dtype=np.int64)
    d_i = DInitial(tuple(a_counts.tolist()), cfg.nus, cfg.p_s, strategy.p_dark)
    d_i_tilde = DInitial(tuple(a_counts.tolist()), cfg.nus, cfg.p_s_tilde,
                         strategy.p_dark)

    def finish_abort(step: int, reason: str) -> SessionOutcome:
        announce(step, "both", f"abort {reason}")
        return SessionOutcome(
            status="aborted", abort_step=step, abort_reason=reason,
            plus=None, times=None,
            experiment=DExperimental(tuple(c_counts.tolist()),
                                     tuple(e_counts.tolist()),
                                     tuple(h_counts.tolist())),
            transcript=tuple(transcript), truth=truth, bounds_report={},
            config=cfg, initial=d_i, initial_tilde=d_i_tilde)

    # Step 4: check bits for the two raw-key kinds; abort if too few pulses.
    if e_counts[i0x] <= cfg.n or e_counts[i0p] <= cfg.n:
        return finish_abort(4, f"E_i0={int(e_counts[i0x])} "
                               f"E_i0k={int(e_counts[i0p])} <= N={cfg.n}")

    raw_positions: dict[int, np.ndarray] = {}
    for kind, tag in ((i0x, "x"), (i0p, "+")):
        pos = np.flatnonzero(common & (kinds == kind))
        n_check = len(pos) - cfg.n
        chosen = np.sort(rng.choice(len(pos), size=n_check, replace=False))
        check_pos = pos[chosen]
        keep = np.ones(len(pos), dtype=bool)
        keep[chosen] = False
        raw_positions[kind] = pos[keep]
        errs = int((alice_bits[check_pos] != bob_bits[check_pos]).sum())
        h_counts[kind] = errs
        announce(4, "alice", f"check-{tag} positions "
                 + ",".join(map(str, check_pos.tolist())))
        announce(4, "alice", f"check-{tag} bits "
                 + _hexbits(alice_bits[check_pos]))
        announce(4, "bob", f"H[{kind}]={errs}")

    # Step 5: remaining kinds are fully announced on their common positions.
    for kind in range(1, n_kinds):
        if kind in (i0x, i0p):
            continue
        pos = np.flatnonzero(common & (kinds == kind))
        errs = int((alice_bits[pos] != bob_bits[pos]).sum())
        h_counts[kind] = errs
        announce(5, "alice", f"bits kind={kind} " + _hexbits(alice_bits[pos]))
        announce(5, "bob", f"bits kind={kind} " + _hexbits(bob_bits[pos])
                 + f" H[{kind}]={errs}")

    experiment = DExperimental(tuple(c_counts.tolist()),
                               tuple(e_counts.tolist()),
                               tuple(h_counts.tolist()))

    # Ground truth for the oracle/bounds tests: classify raw-key positions.
    for kind, name in ((i0p, "plus"), (i0x, "times")):
        pos = raw_positions[kind]
        labels = []
        for p in pos:
            pc = (VACUUM, SINGLE, MULTI)[cls[p]]
            basis = None if cls[p] == 0 else ("x" if basis_alice[p] == TIMES else "+")
            if pc == MULTI:
                labels.append(PulseLabel(pc, (NORMAL, DARK)[det[p] - 1], n=2, basis=basis))
            elif pc == SINGLE:
                labels.append(PulseLabel(pc, (NORMAL, DARK)[det[p] - 1], basis=basis))
            else:
                labels.append(PulseLabel(pc, (NORMAL, DARK)[det[p] - 1]))
        counts = classify(labels)
        t = int(sum(1 for p in pos
                    if cls[p] == 1 and det[p] == 1 and zflip[p] == 1))
        truth[name] = replace(counts, t=t)

    # Step 6: error-correction rates, sacrifice sizes, aborts and clamps.
    m_rule = _resolve_m_rule(cfg)
    results: dict[str, BasisResult] = {}
    for kind, name, d_init in ((i0p, "plus", d_i), (i0x, "times", d_i_tilde)):
        n_check = int(e_counts[kind]) - cfg.n
        err = h_counts[kind] / n_check
        lm = math.floor(cfg.n * cfg.eta(err))
        m_bits = int(m_rule(cfg, d_init, experiment, name, lm))
        m_bits = max(0, m_bits)
        clamped = False
        if lm - m_bits < cfg.n_under:
            return finish_abort(6, f"{name}: N eta - m = {lm - m_bits} "
                                   f"< N_under={cfg.n_under}")
        if lm - m_bits > cfg.n_bar:
            m_bits = lm - cfg.n_bar
            clamped = True
        announce(6, "both", f"{name} lm={lm} m={m_bits} l={lm - m_bits}"
                 + (" clamped" if clamped else ""))
        results[name] = BasisResult(observed_error=float(err), lm=lm,
                                    m=m_bits, length=lm - m_bits,
                                    m_clamped=clamped)

    # Steps 7-10: error correction then privacy amplification, per basis.
    for kind, name, step_ec, step_pa in ((i0p, "plus", 7, 8),
                                         (i0x, "times", 9, 10)):
        res = results[name]
        pos = raw_positions[kind]
        x_alice = _bv_from_array(alice_bits[pos])
        x_bob = _bv_from_array(bob_bits[pos])
        m_e = random_full_rank_matrix(rng, cfg.n, res.lm)
        digest = hashlib.sha256(
            b"".join(r.to_bytes(16, "little") for r in m_e.row_bits)).hexdigest()[:16]
        announce(step_ec, "both", f"{name} code {digest}")
        if cfg.ec_direction == "forward":
            z_alice, z_bob, ok = forward_error_correct(
                x_alice, x_bob, m_e, rng, cfg.decode_guard)
            announce(step_ec, "alice", f"{name} masked "
                     + format(mat_vec_xor(m_e, z_alice, x_alice).bits, "x"))
        else:
            z_alice, z_bob, ok = reverse_error_correct(
                x_alice, x_bob, m_e, rng, cfg.decode_guard)
            announce(step_ec, "bob", f"{name} masked "
                     + format(mat_vec_xor(m_e, z_bob, x_bob).bits, "x"))
        hash_fn = sample_seed(rng, res.length, res.m)
        announce(step_pa, "both", f"{name} pa-seed " + format(hash_fn.seed.bits, "x"))
        res.alice_key = hash_fn.apply(z_alice)
        res.bob_key = hash_fn.apply(z_bob)
        res.ec_success = ok

    report = {
        "plus": _basis_report(results["plus"], cfg, truth["plus"]),
        "times": _basis_report(results["times"], cfg, truth["times"]),
    }
    return SessionOutcome(
        status="completed", abort_step=None, abort_reason=None,
        plus=results["plus"], times=results["times"],
        experiment=experiment, transcript=tuple(transcript),
        truth=truth, bounds_report=report, config=cfg,
        initial=d_i, initial_tilde=d_i_tilde)


def _basis_report(res: BasisResult, cfg: SessionConfig,
                  truth: ClassCounts) -> dict:
    # Simulator-side ground truth lets analyses attach the exact bound the
    # realized classification would give; the parties never see these.
    from .bounds import min_decoding_bound
    k2 = {"forward": truth.j2 + truth.j4 + truth.j5,
          "reverse": truth.j0 + truth.j2}[cfg.ec_direction]
    k2_two = truth.j0 + truth.j2 + truth.j4 + truth.j5
    return {
        "observed_error": res.observed_error,
        "eta": cfg.eta(res.observed_error),
        "lm": res.lm,
        "m": res.m,
        "length": res.length,
        "m_clamped": res.m_clamped,
        "length_within_window": cfg.n_under <= res.length <= cfg.n_bar,
        "ec_success": res.ec_success,
        "truth_phase_error_bound": min_decoding_bound(
            truth.j1, k2, truth.t, res.m),
        "truth_twoway_bound": min_decoding_bound(
            truth.j1, k2_two, truth.t, res.m),
    }


def extract_experiment_data(outcome: SessionOutcome,
                            tilde: bool = False) -> tuple[DInitial, DExperimental]:
    """The (initial data, experimental data) pair used by the estimators.

    ``tilde=True`` swaps in the + basis detector calibration.
    """
    if outcome.abort_step is not None and outcome.abort_step < 6:
        raise SessionAborted(
            f"session aborted at step {outcome.abort_step}: {outcome.abort_reason}")
    if outcome.experiment is None or outcome.initial is None:
        raise SessionAborted("no experimental data recorded")
    return (outcome.initial_tilde if tilde else outcome.initial,
            outcome.experiment)


# ----------------------------------------------------------------------
# Session config files: flat key = value text with JSON values.

CONFIG_KEYS = ("n", "n_bar", "n_under", "n_prime", "nus", "i0", "p_bar",
               "p_s", "p_s_tilde", "eta", "m_rule", "margin_bits",
               "ec_direction", "rng_seed", "decode_guard", "record_transcript")

_NAMED_ETAS = {"shannon": shannon_eta}


def config_to_text(cfg: SessionConfig) -> str:
    lines = ["# session config"]
    for key in CONFIG_KEYS:
        value = getattr(cfg, key)
        if key == "nus":
            value = [[nu.v0, nu.v1, nu.v2] for nu in value]
        elif key == "p_bar":
            value = list(value)
        elif key == "eta":
            if value is not shannon_eta:
                raise ValueError("only the named 'shannon' eta serializes")
            value = "shannon"
        elif key == "m_rule" and callable(value):
            raise ValueError("cannot serialize a callable m_rule")
        lines.append(f"{key} = {json.dumps(value)}")
    return "\n".join(lines) + "\n"


def config_from_text(text: str) -> SessionConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = json.loads(val.strip())
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {lineno}: bad value: {exc}") from exc
    if "nus" in values:
        values["nus"] = tuple(SourceDistribution(*v) for v in values["nus"])
    if "p_bar" in values:
        values["p_bar"] = tuple(values["p_bar"])
    if "eta" in values:
        try:
            values["eta"] = _NAMED_ETAS[values["eta"]]
        except KeyError:
            raise ValueError(f"unknown eta {values['eta']!r}; "
                             f"known: {sorted(_NAMED_ETAS)}") from None
    return SessionConfig(**values)

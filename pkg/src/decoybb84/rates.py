"""Asymptotic key-generation rates and their ordering chain.

Six rates per sent pulse (the 1/2 factor is basis sifting):

* forward  (dark counts and vacuum credited to the key),
* reverse  (dark counts credited),
* two-way  (only vacuum dark counts survive the syndrome exchange),
* GLLP-ILM (no dark-count credit, effective single-photon parameters),
* barred forward/reverse (effective parameters, vacuum credit kept/dropped).

The effective parameters fold dark counts into the single-photon pool:
q1_bar = q1 + p_D and r1_bar mixes the channel error rate with the fair
coin of a dark count.  Concavity of the entropy makes the refined rates
dominate the barred ones whenever inputs are physical (p0 >= p_D in
particular, since a vacuum pulse can always fire the dark counter).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .bounds import hbar
from .decoy import SourceDistribution

RATE_NAMES = ("forward", "reverse", "twoway", "gllp_ilm",
              "bar_forward", "bar_reverse")


def shannon_eta(e: float) -> float:
    """Default error-correction rate: the Shannon-limit idealization."""
    return 1.0 - hbar(e)


@dataclass(frozen=True)
class RateInputs:
    """Inputs to the rate formulas; eta is the error-correction rate function."""

    nu: SourceDistribution
    q1: float
    r1: float
    p0: float
    p_dark: float
    p_nu_plus: float
    s_nu_plus: float
    eta: Callable[[float], float] = shannon_eta

    def __post_init__(self):
        for name in ("q1", "r1", "p0", "p_dark", "p_nu_plus", "s_nu_plus"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    def correction(self) -> float:
        """Error-correction debit p_nu_plus (1 - eta(s_nu_plus))."""
        return self.p_nu_plus * (1.0 - self.eta(self.s_nu_plus))

    def photon_term(self) -> float:
        return self.nu.v1 * self.q1 * (1.0 - hbar(self.r1))

    def photon_term_bar(self) -> float:
        q1b, r1b = gllp_effective_params(self.q1, self.r1, self.p_dark)
        return self.nu.v1 * q1b * (1.0 - hbar(r1b))


def gllp_effective_params(q1: float, r1: float, p_dark: float) -> tuple[float, float]:
    """Effective (yield, error rate) counting dark-count singles as signal."""
    if q1 + p_dark <= 0.0:
        raise ValueError("q1 + p_D must be positive")
    q1_bar = q1 + p_dark
    r1_bar = (r1 * q1 + 0.5 * p_dark) / q1_bar
    return q1_bar, r1_bar


def rate_forward(inputs: RateInputs) -> float:
    """Forward error correction: credit the detected vacuum contribution."""
    return 0.5 * (inputs.photon_term() + inputs.nu.v0 * inputs.p0
                  - inputs.correction())


def rate_reverse(inputs: RateInputs) -> float:
    """Reverse error correction: credit all dark counts."""
    return 0.5 * (inputs.photon_term() + inputs.p_dark - inputs.correction())


def rate_twoway(inputs: RateInputs) -> float:
    """Two-way error correction: only vacuum dark counts stay credited."""
    return 0.5 * (inputs.photon_term() + inputs.nu.v0 * inputs.p_dark
                  - inputs.correction())


def rate_gllp_ilm(inputs: RateInputs) -> float:
    """Effective-parameter rate with no dark-count credit."""
    return 0.5 * (inputs.photon_term_bar() - inputs.correction())


def rate_bar_forward(inputs: RateInputs) -> float:
    return 0.5 * (inputs.photon_term_bar() + inputs.nu.v0 * inputs.p0
                  - inputs.correction())


def rate_bar_reverse(inputs: RateInputs) -> float:
    return 0.5 * (inputs.photon_term_bar() - inputs.correction())


def all_rates(inputs: RateInputs) -> dict[str, float]:
    return {
        "forward": rate_forward(inputs),
        "reverse": rate_reverse(inputs),
        "twoway": rate_twoway(inputs),
        "gllp_ilm": rate_gllp_ilm(inputs),
        "bar_forward": rate_bar_forward(inputs),
        "bar_reverse": rate_bar_reverse(inputs),
    }


def initial_eve_information_asymptotic(nu: SourceDistribution, q1: float,
                                       r1: float, p0: float, p_dark: float,
                                       p_nu_plus: float, n: int,
                                       direction: str = "forward") -> float:
    """Initial Eve information for an N-bit raw key, rate form.

    Forward credits the vacuum counting contribution, reverse the dark
    counts; either way the single-photon fraction contributes only its
    entropy-degraded share.
    """
    if p_nu_plus <= 0.0:
        raise ValueError("counting rate must be positive")
    photon = nu.v1 * q1 * (1.0 - hbar(r1)) / p_nu_plus
    if direction == "forward":
        credit = nu.v0 * p0 / p_nu_plus
    elif direction == "reverse":
        credit = p_dark / p_nu_plus
    else:
        raise ValueError("direction must be 'forward' or 'reverse'")
    return n * (1.0 - photon - credit)


def initial_eve_information_counts(j: Mapping[str, int] | tuple, r1: float,
                                   direction: str = "forward") -> float:
    """Initial Eve information from the actual classification counts."""
    if isinstance(j, tuple):
        j0, j1, j2, j3, j4, j5 = j
    else:
        j0, j1, j2, j3, j4, j5 = (j["j0"], j["j1"], j["j2"],
                                  j["j3"], j["j4"], j["j5"])
    base = j1 * hbar(r1)
    if direction == "forward":
        return base + j2 + j4 + j5
    if direction == "reverse":
        return base + j0 + j2
    raise ValueError("direction must be 'forward' or 'reverse'")


@dataclass(frozen=True)
class OrderingReport:
    """All six rates plus each chain inequality with its slack."""

    rates: dict[str, float]
    checks: tuple[tuple[str, float, bool], ...]

    @property
    def all_ok(self) -> bool:
        return all(ok for _, _, ok in self.checks)


def verify_rate_ordering(inputs: RateInputs, tol: float = 1e-12) -> OrderingReport:
    """Evaluate the chain: forward >= bar_forward >= gllp, reverse >= twoway
    >= bar_reverse >= gllp, and forward >= twoway (needs p0 >= p_D)."""
    r = all_rates(inputs)
    pairs = [
        ("forward>=bar_forward", r["forward"] - r["bar_forward"]),
        ("bar_forward>=gllp_ilm", r["bar_forward"] - r["gllp_ilm"]),
        ("reverse>=twoway", r["reverse"] - r["twoway"]),
        ("twoway>=bar_reverse", r["twoway"] - r["bar_reverse"]),
        ("bar_reverse>=gllp_ilm", r["bar_reverse"] - r["gllp_ilm"]),
    ]
    if inputs.p0 >= inputs.p_dark:
        pairs.append(("forward>=twoway", r["forward"] - r["twoway"]))
    checks = tuple((name, slack, slack >= -tol) for name, slack in pairs)
    return OrderingReport(rates=r, checks=checks)

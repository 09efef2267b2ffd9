"""Statistics for simulation runs.

Three layers:

* small numerics: Wilson 95% score intervals, the chi-square survival
  function for 3 degrees of freedom in closed form, and a uniformity test
  over the four Bell outcomes;
* analytic attack rates: per-check mismatch and per-group key-guess
  probabilities are ENUMERATED from the statevector simulator by
  conditioning on each measurement outcome, not hard-coded, so the
  analytic column in reports is itself oracle-derived;
* Monte Carlo drivers that run full sessions trial by trial and summarize
  detection, key-agreement, and eavesdropper success rates.

The guessing adversary gets a dedicated vectorized path: once the swap
outcome distribution is known to be uniform (the oracle checks cover
that), a trial reduces to independent uniform draws for the honest outcome
and the guess, so millions of trials are cheap and no statevector is
touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .adversary import STRATEGY_KINDS, make_strategy
from .bell import BELL_ORDER, BellIndex, swap_partner
from .protocol import SessionConfig, run_session
from .statevector import make_bell, make_ghz3, outcome_distribution, project_bell, tensor

Z95 = 1.959963984540054  # two-sided 95% normal quantile

_PHI = BellIndex.PHI_PLUS
_NEGLIGIBLE = 1e-12


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion, as (lo, hi)."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    p = successes / trials
    z2 = Z95 * Z95
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = (Z95 / denom) * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials))
    return (center - half, center + half)


def half_width(interval: tuple[float, float]) -> float:
    return (interval[1] - interval[0]) / 2.0


def chi2_sf_3df(x: float) -> float:
    """P(X >= x) for a chi-square variable with 3 degrees of freedom.

    For odd degrees of freedom the survival function is elementary; with
    3 df it is erfc(sqrt(x/2)) + sqrt(2x/pi) * exp(-x/2).
    """
    if x < 0:
        raise ValueError("chi-square statistic cannot be negative")
    if x == 0:
        return 1.0
    return math.erfc(math.sqrt(x / 2.0)) + math.sqrt(2.0 * x / math.pi) * math.exp(-x / 2.0)


def uniformity_test(counts) -> tuple[float, float]:
    """Chi-square test of the four outcome counts against uniform.

    Returns (statistic, p_value).  Requires at least 40 total samples so
    every expected cell count is >= 10.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if counts.shape != (4,):
        raise ValueError("expected exactly four outcome counts")
    if (counts < 0).any():
        raise ValueError("counts cannot be negative")
    total = int(counts.sum())
    if total < 40:
        raise ValueError("need at least 40 samples for the uniformity test")
    expected = total / 4.0
    stat = float(((counts - expected) ** 2 / expected).sum())
    return stat, chi2_sf_3df(stat)


@lru_cache(maxsize=None)
def per_check_mismatch(kind: str) -> float:
    """Probability one CHECKED group's fragments disagree, by enumeration.

    Walks the exact physical sequence (Alice projects, then Bob's outcome
    distribution on the post-measurement state) over every branch with its
    Born weight.  Honest channels and the guessing adversary leave the
    genuine pairs untouched, so their mismatch probability is zero by the
    swap identity.
    """
    if kind in ("none", "type1"):
        return 0.0
    if kind == "type2":
        sv = tensor(make_ghz3("1", "2", "5"), make_ghz3("3", "4", "6"))
        mismatch = 0.0
        p_alice = outcome_distribution(sv, "1", "3")
        for a in BELL_ORDER:
            if p_alice[a.ordinal] < _NEGLIGIBLE:
                continue
            _, after = project_bell(sv, "1", "3", a)
            p_bob = outcome_distribution(after, "2", "4")
            agree = swap_partner(_PHI, _PHI, a)  # Bob outcome Alice expects
            mismatch += p_alice[a.ordinal] * (1.0 - p_bob[agree.ordinal])
        return mismatch
    if kind == "type3":
        alice_side = tensor(make_bell(_PHI, "1", "2"), make_bell(_PHI, "3", "4"))
        bob_side = tensor(make_bell(_PHI, "1p", "2p"), make_bell(_PHI, "3p", "4p"))
        p_alice = outcome_distribution(alice_side, "1", "3")
        p_bob = outcome_distribution(bob_side, "2p", "4p")
        mismatch = 0.0
        for a in BELL_ORDER:
            for b in BELL_ORDER:
                # independent halves; fragments agree only when the swap
                # inference maps b back to a, i.e. b equals Alice's
                # expectation
                agree = swap_partner(_PHI, _PHI, a)
                if b is not agree:
                    mismatch += p_alice[a.ordinal] * p_bob[b.ordinal]
        return mismatch
    raise ValueError(f"unknown adversary kind: {kind!r}")


@lru_cache(maxsize=None)
def per_group_eve_success(kind: str) -> float | None:
    """Probability the adversary reconstructs one group's fragment.

    None for the honest channel (there is no adversary to succeed).
    Enumerated from the simulator with the same conditioning order the
    protocol uses.
    """
    if kind == "none":
        return None
    if kind == "type1":
        # her private pairs are independent of the genuine channel, so the
        # two outcome distributions just overlap
        genuine = tensor(make_bell(_PHI, "1", "2"), make_bell(_PHI, "3", "4"))
        private = tensor(make_bell(_PHI, "1p", "2p"), make_bell(_PHI, "3p", "4p"))
        p_honest = outcome_distribution(genuine, "1", "3")
        p_guess = outcome_distribution(private, "1p", "3p")
        return float(sum(p_honest[a.ordinal] * p_guess[a.ordinal] for a in BELL_ORDER))
    if kind == "type2":
        sv = tensor(make_ghz3("1", "2", "5"), make_ghz3("3", "4", "6"))
        success = 0.0
        p_alice = outcome_distribution(sv, "1", "3")
        for a in BELL_ORDER:
            if p_alice[a.ordinal] < _NEGLIGIBLE:
                continue
            _, after_a = project_bell(sv, "1", "3", a)
            p_bob = outcome_distribution(after_a, "2", "4")
            for b in BELL_ORDER:
                if p_bob[b.ordinal] < _NEGLIGIBLE:
                    continue
                _, after_b = project_bell(after_a, "2", "4", b)
                p_eve = outcome_distribution(after_b, "5", "6")
                for e in BELL_ORDER:
                    if p_eve[e.ordinal] < _NEGLIGIBLE:
                        continue
                    # her guess copies the parity bit and flips a fair
                    # coin for the phase bit
                    phase_hit = 0.5
                    parity_hit = 1.0 if e.parity == a.parity else 0.0
                    success += (
                        p_alice[a.ordinal]
                        * p_bob[b.ordinal]
                        * p_eve[e.ordinal]
                        * phase_hit
                        * parity_hit
                    )
        return success
    if kind == "type3":
        # she measures the partner qubits of Alice's own pairs, so the swap
        # identity hands her Alice's outcome verbatim
        sv = tensor(make_bell(_PHI, "1", "2"), make_bell(_PHI, "3", "4"))
        success = 0.0
        p_alice = outcome_distribution(sv, "1", "3")
        for a in BELL_ORDER:
            if p_alice[a.ordinal] < _NEGLIGIBLE:
                continue
            _, after = project_bell(sv, "1", "3", a)
            p_eve = outcome_distribution(after, "2", "4")
            success += p_alice[a.ordinal] * p_eve[a.ordinal]
        return success
    raise ValueError(f"unknown adversary kind: {kind!r}")


def analytic_detection(kind: str, k_checked: int) -> float:
    """Probability at least one of k checked groups exposes the attack."""
    if kind not in STRATEGY_KINDS:
        raise ValueError(f"unknown adversary kind: {kind!r}")
    if k_checked < 1:
        raise ValueError("at least one group must be checked")
    return 1.0 - (1.0 - per_check_mismatch(kind)) ** k_checked


def analytic_eve_key(kind: str, n_groups: int) -> float | None:
    """Probability the adversary reconstructs the whole 4n-bit string."""
    if n_groups < 1:
        raise ValueError("n_groups must be positive")
    per_group = per_group_eve_success(kind)
    if per_group is None:
        return None
    return per_group**n_groups


@dataclass(frozen=True)
class MCReport:
    """Summary of one Monte Carlo batch of identical sessions."""

    strategy: str
    n_groups: int
    k_checked: int
    trials: int
    seed: int
    detection_rate: float
    detection_interval: tuple[float, float]
    eve_key_rate: float | None
    eve_key_interval: tuple[float, float] | None
    key_agreement_rate: float
    outcome_counts: tuple[int, int, int, int]
    analytic_detection: float
    analytic_eve_key: float | None

    def to_json_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "n_groups": self.n_groups,
            "k_checked": self.k_checked,
            "trials": self.trials,
            "seed": self.seed,
            "detection_rate": self.detection_rate,
            "detection_interval": list(self.detection_interval),
            "eve_key_rate": self.eve_key_rate,
            "eve_key_interval": list(self.eve_key_interval) if self.eve_key_interval else None,
            "key_agreement_rate": self.key_agreement_rate,
            "outcome_counts": list(self.outcome_counts),
            "analytic_detection": self.analytic_detection,
            "analytic_eve_key": self.analytic_eve_key,
        }


def _guesser_fast_batch(config: SessionConfig, trials: int, seed: int) -> MCReport:
    """Vectorized batch for the guessing adversary.

    Valid because the attack never touches the genuine channel: honest
    outcomes stay uniform, fragments always agree, detection is
    impossible, and her per-group guess is an independent uniform draw.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    n = config.n_groups
    honest = rng.integers(0, 4, size=(trials, n))
    guesses = rng.integers(0, 4, size=(trials, n))
    full_hits = int((honest == guesses).all(axis=1).sum())
    counts = np.bincount(honest.ravel(), minlength=4)
    return MCReport(
        strategy="type1",
        n_groups=n,
        k_checked=config.k_checked,
        trials=trials,
        seed=seed,
        detection_rate=0.0,
        detection_interval=wilson_interval(0, trials),
        eve_key_rate=full_hits / trials,
        eve_key_interval=wilson_interval(full_hits, trials),
        key_agreement_rate=1.0,
        outcome_counts=tuple(int(c) for c in counts),
        analytic_detection=analytic_detection("type1", config.k_checked),
        analytic_eve_key=analytic_eve_key("type1", n),
    )


def monte_carlo(
    config: SessionConfig,
    kind: str = "none",
    trials: int = 1000,
    seed: int = 0,
    fast_guesser: bool = True,
) -> MCReport:
    """Run `trials` independent sessions and summarize them.

    Trial t reseeds from (seed, trial index), so batches are reproducible
    and insensitive to trial order.  `eve_key_rate` counts trials where
    the adversary reconstructed ALL n fragments, checked groups included;
    `key_agreement_rate` counts trials where every honest fragment pair
    agreed.
    """
    if kind not in STRATEGY_KINDS:
        raise ValueError(f"unknown adversary kind: {kind!r}")
    if trials < 1:
        raise ValueError("trials must be positive")
    if kind == "type1" and fast_guesser:
        return _guesser_fast_batch(config, trials, seed)

    detections = 0
    agreements = 0
    eve_hits = 0
    counts = np.zeros(4, dtype=np.int64)
    for t in range(trials):
        ss = np.random.SeedSequence(seed, spawn_key=(t,))
        report = run_session(config, make_strategy(kind), ss)
        if report.verdict == "abort":
            detections += 1
        if all(g.alice_fragment.bits == g.bob_fragment.bits for g in report.groups):
            agreements += 1
        if report.eve is not None and report.eve.full_key_correct:
            eve_hits += 1
        for g in report.groups:
            counts[g.alice_outcome.ordinal] += 1
    eve_key_rate = None if kind == "none" else eve_hits / trials
    eve_key_interval = None if kind == "none" else wilson_interval(eve_hits, trials)
    return MCReport(
        strategy=kind,
        n_groups=config.n_groups,
        k_checked=config.k_checked,
        trials=trials,
        seed=seed,
        detection_rate=detections / trials,
        detection_interval=wilson_interval(detections, trials),
        eve_key_rate=eve_key_rate,
        eve_key_interval=eve_key_interval,
        key_agreement_rate=agreements / trials,
        outcome_counts=tuple(int(c) for c in counts),
        analytic_detection=analytic_detection(kind, config.k_checked),
        analytic_eve_key=analytic_eve_key(kind, config.n_groups),
    )


@dataclass(frozen=True)
class EfficiencyReport:
    """Raw and net key yield for a session shape."""

    n_groups: int
    k_checked: int
    raw_bits_per_group: float
    raw_bits_per_particle: float
    net_bits_per_particle: float
    reference_bits_per_pair: dict[str, float]

    def to_json_dict(self) -> dict:
        return {
            "n_groups": self.n_groups,
            "k_checked": self.k_checked,
            "raw_bits_per_group": self.raw_bits_per_group,
            "raw_bits_per_particle": self.raw_bits_per_particle,
            "net_bits_per_particle": self.net_bits_per_particle,
            "reference_bits_per_pair": dict(self.reference_bits_per_pair),
        }


def efficiency_report(n_groups: int, check_fraction: float) -> EfficiencyReport:
    """Key yield: 4 bits per group of two pairs before sifting.

    Each group spends two pairs (four particles) and yields a 4-bit
    fragment, so the raw rate is one bit per particle; checked groups are
    discarded, leaving 1 - k/n of that.  Reference rates: BB84 extracts at
    most one bit per pair, B92 one bit per two pairs; this scheme's raw
    two bits per pair is the draw.
    """
    config = SessionConfig(n_groups=n_groups, check_fraction=check_fraction)
    k = config.k_checked
    return EfficiencyReport(
        n_groups=n_groups,
        k_checked=k,
        raw_bits_per_group=4.0,
        raw_bits_per_particle=1.0,
        net_bits_per_particle=1.0 - k / n_groups,
        reference_bits_per_pair={"this_scheme_raw": 2.0, "bb84": 1.0, "b92": 0.5},
    )


SWEEP_CSV_HEADER = (
    "strategy",
    "n_groups",
    "k_checked",
    "trials",
    "detection_rate",
    "ci",
    "analytic",
    "eve_key_rate",
    "agreement_rate",
)


def sweep_csv_row(report: MCReport) -> list[str]:
    """One CSV row per batch; `ci` is the Wilson half-width on detection."""
    return [
        report.strategy,
        str(report.n_groups),
        str(report.k_checked),
        str(report.trials),
        f"{report.detection_rate:.6f}",
        f"{half_width(report.detection_interval):.6f}",
        f"{report.analytic_detection:.6f}",
        "" if report.eve_key_rate is None else f"{report.eve_key_rate:.6f}",
        f"{report.key_agreement_rate:.6f}",
    ]

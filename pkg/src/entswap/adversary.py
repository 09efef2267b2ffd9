"""Eavesdropping strategies as channel-corruption and measurement plug-ins.

Three attacks are modeled, plus the honest baseline:

* ``none``  - no adversary; the declared Bell pairs are laid out genuinely.
* ``type1`` - an independent guesser: she never touches the shared channel,
  swaps her own private pairs, and uses her outcomes as guesses.
* ``type2`` - a channel entangler: instead of each declared pair she
  fabricates a three-qubit GHZ state and keeps the third qubit, so she holds
  one qubit per shared pair.
* ``type3`` - a channel replacer (man in the middle): she shares pairs with
  Alice and, separately, pairs with Bob, and swaps on her own halves.

All adversary physics flows through the statevector oracle; no correlation
table is hard-coded here, so the detection and guess probabilities the
analysis layer reports are outputs of the simulation, not inputs.

Measurement ordering is fixed: the entangler and the guesser measure after
both parties ("after_bob"), the replacer measures between Alice and Bob
("after_alice").  Outcome statistics do not depend on this order (the
measurements act on disjoint qubits); a property test asserts as much.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import TYPE_CHECKING, Sequence, Union

import numpy as np

from .bell import BellIndex, group_key_fragment, swap_partner
from .statevector import StateVector, make_bell, make_ghz3, measure_bell, tensor

if TYPE_CHECKING:
    from .protocol import GroupRecord

PHI = BellIndex.PHI_PLUS

# (system name, (qubit label, qubit label)) - one measurable pair.
Target = tuple[str, tuple[str, str]]


class UnsupportedAttackError(ValueError):
    """The attack is only defined for all-phi+ declared channel states."""


class AdversaryOrderError(RuntimeError):
    """Eve's measurements were driven out of their fixed order."""


@dataclass
class GroupChannels:
    """Physical systems of one group and who measures which pair where.

    The honest parties only ever see their own targets; the layout itself
    (which may differ from the declared pair states) stays in here.
    """

    systems: dict[str, StateVector]
    alice: Target
    bob: Target
    eve: tuple[Target, ...] = ()

    def measure(self, target: Target, rng: np.random.Generator) -> BellIndex:
        name, (qi, qj) = target
        record, collapsed = measure_bell(self.systems[name], qi, qj, rng)
        self.systems[name] = collapsed
        return record.outcome


@dataclass
class NoEve:
    kind = "none"


@dataclass
class IndependentGuesser:
    """Owns private phi+ pairs per group; her swap outcomes are her guesses."""

    kind = "type1"
    outcomes: list[BellIndex] = field(default_factory=list)
    measured: bool = False


@dataclass
class ChannelEntangler:
    """Replaces each shared pair with a GHZ triple and keeps the third qubit."""

    kind = "type2"
    outcomes: list[BellIndex] = field(default_factory=list)
    measured: bool = False


@dataclass
class ChannelReplacer:
    """Shares pairs with Alice and with Bob separately and swaps in between."""

    kind = "type3"
    alice_facing: list[BellIndex] = field(default_factory=list)
    bob_facing: list[BellIndex] = field(default_factory=list)
    measured: bool = False


AdversaryStrategy = Union[NoEve, IndependentGuesser, ChannelEntangler, ChannelReplacer]

STRATEGY_KINDS = ("none", "type1", "type2", "type3")


def make_strategy(kind: str) -> AdversaryStrategy:
    """Fresh per-session strategy state for a wire-format kind tag."""
    classes = {
        "none": NoEve,
        "type1": IndependentGuesser,
        "type2": ChannelEntangler,
        "type3": ChannelReplacer,
    }
    try:
        return classes[kind]()
    except KeyError:
        raise ValueError(f"unknown adversary kind {kind!r}; expected one of {STRATEGY_KINDS}") from None


@lru_cache(maxsize=None)
def _pair_tensor(a: BellIndex, b: BellIndex) -> StateVector:
    return tensor(make_bell(a, "1", "2"), make_bell(b, "3", "4"))


@lru_cache(maxsize=None)
def _ghz_pair_tensor() -> StateVector:
    return tensor(make_ghz3("1", "2", "5"), make_ghz3("3", "4", "6"))


@lru_cache(maxsize=None)
def _phi_pair_tensor(primed: bool) -> StateVector:
    s = "p" if primed else ""
    return tensor(make_bell(PHI, "1" + s, "2" + s), make_bell(PHI, "3" + s, "4" + s))


def _require_all_phi(strategy: AdversaryStrategy, declared: Sequence[tuple[BellIndex, BellIndex]]) -> None:
    for a, b in declared:
        if a is not PHI or b is not PHI:
            raise UnsupportedAttackError(
                f"{strategy.kind} is only modeled for phi+ channels, declared ({a}, {b})"
            )


def corrupt_channels(
    strategy: AdversaryStrategy,
    declared: Sequence[tuple[BellIndex, BellIndex]],
    rng: np.random.Generator | None = None,
) -> list[GroupChannels]:
    """Materialize each group's physical systems under the given strategy.

    ``declared`` holds the per-group pair states the honest parties believe
    in.  With no adversary (and for the independent guesser, who leaves the
    channel alone) the physical state is exactly the declared tensor.
    Layouts are deterministic; ``rng`` is accepted for interface symmetry.
    """
    channels: list[GroupChannels] = []
    for a, b in declared:
        if isinstance(strategy, (NoEve, IndependentGuesser)):
            systems = {"main": _pair_tensor(a, b)}
            if isinstance(strategy, IndependentGuesser):
                systems["eve"] = _phi_pair_tensor(True)
            channels.append(
                GroupChannels(
                    systems=systems,
                    alice=("main", ("1", "3")),
                    bob=("main", ("2", "4")),
                    eve=(("eve", ("1p", "3p")),) if isinstance(strategy, IndependentGuesser) else (),
                )
            )
        elif isinstance(strategy, ChannelEntangler):
            _require_all_phi(strategy, [(a, b)])
            channels.append(
                GroupChannels(
                    systems={"main": _ghz_pair_tensor()},
                    alice=("main", ("1", "3")),
                    bob=("main", ("2", "4")),
                    eve=(("main", ("5", "6")),),
                )
            )
        elif isinstance(strategy, ChannelReplacer):
            _require_all_phi(strategy, [(a, b)])
            channels.append(
                GroupChannels(
                    systems={
                        "alice_side": _phi_pair_tensor(False),
                        "bob_side": _phi_pair_tensor(True),
                    },
                    alice=("alice_side", ("1", "3")),
                    bob=("bob_side", ("2p", "4p")),
                    eve=(("bob_side", ("1p", "3p")), ("alice_side", ("2", "4"))),
                )
            )
        else:
            raise TypeError(f"not an adversary strategy: {strategy!r}")
    return channels


def eve_measure(
    strategy: AdversaryStrategy,
    channels: Sequence[GroupChannels],
    stage: str,
    rng: np.random.Generator,
) -> None:
    """Run Eve's measurements for the given stage of the session.

    ``stage`` is "after_alice" or "after_bob".  Each strategy acts at its
    fixed stage and records outcomes in its own state; acting twice, or
    reaching "after_bob" without the replacer having measured, is an
    ordering error.
    """
    if stage not in ("after_alice", "after_bob"):
        raise ValueError(f"unknown stage {stage!r}")
    if isinstance(strategy, NoEve):
        return
    if isinstance(strategy, (IndependentGuesser, ChannelEntangler)):
        if stage != "after_bob":
            return
        if strategy.measured:
            raise AdversaryOrderError(f"{strategy.kind} already measured")
        for ch in channels:
            strategy.outcomes.append(ch.measure(ch.eve[0], rng))
        strategy.measured = True
        return
    if isinstance(strategy, ChannelReplacer):
        if stage == "after_alice":
            if strategy.measured:
                raise AdversaryOrderError(f"{strategy.kind} already measured")
            for ch in channels:
                strategy.bob_facing.append(ch.measure(ch.eve[0], rng))
                strategy.alice_facing.append(ch.measure(ch.eve[1], rng))
            strategy.measured = True
        elif not strategy.measured:
            raise AdversaryOrderError("type3 must measure its Bob-facing pairs before Bob does")
        return
    raise TypeError(f"not an adversary strategy: {strategy!r}")


@dataclass(frozen=True)
class EveReport:
    """What Eve ended up knowing, scored against Alice's fragments.

    ``guessed_key`` covers the unchecked groups only, aligned with the
    session key.  ``per_group_correct`` and ``full_key_correct`` score her
    guesses over ALL groups, i.e. the full 4n-bit string the parties
    produced before any check sacrifice.
    """

    guessed_key: str
    full_key_correct: bool
    per_group_correct: tuple[bool, ...]

    def to_json_dict(self) -> dict:
        return {
            "guessed_key": self.guessed_key,
            "full_key_correct": self.full_key_correct,
            "per_group_correct": list(self.per_group_correct),
        }


def _guess_outcome(
    strategy: AdversaryStrategy, group_index: int, rng: np.random.Generator
) -> BellIndex:
    """Eve's best guess for Alice's swap outcome on one group."""
    if isinstance(strategy, IndependentGuesser):
        return strategy.outcomes[group_index]
    if isinstance(strategy, ChannelEntangler):
        # Her own outcome fixes Alice's parity bit and the XOR of the two
        # phase bits, but not Alice's phase itself: flip a coin for it.
        e = strategy.outcomes[group_index]
        return BellIndex((int(rng.integers(0, 2)), e.parity))
    if isinstance(strategy, ChannelReplacer):
        # Her Alice-side halves are perfectly correlated with Alice's pair.
        return strategy.alice_facing[group_index]
    raise TypeError(f"no guess rule for {strategy!r}")


def eve_guess_key(
    strategy: AdversaryStrategy,
    groups: Sequence["GroupRecord"],
    rng: np.random.Generator,
) -> EveReport | None:
    """Derive Eve's key guess from her outcomes and the public transcript.

    She legitimately knows the declared pair states, and which groups were
    checked (both are public); Alice's actual fragments are used only to
    score her guesses.
    """
    if isinstance(strategy, NoEve):
        return None
    if not strategy.measured:
        raise AdversaryOrderError(f"{strategy.kind} must measure before guessing")
    guessed_fragments: list[str] = []
    correct: list[bool] = []
    for g in groups:
        guess = _guess_outcome(strategy, g.group_index, rng)
        partner = swap_partner(g.pair_a_state, g.pair_b_state, guess)
        bits = group_key_fragment(guess, partner, g.group_index).bits
        guessed_fragments.append(bits)
        correct.append(bits == g.alice_fragment.bits)
    guessed_key = "".join(
        bits for bits, g in zip(guessed_fragments, groups) if not g.checked
    )
    return EveReport(
        guessed_key=guessed_key,
        full_key_correct=all(correct),
        per_group_correct=tuple(correct),
    )


@dataclass(frozen=True)
class EveSuccess:
    """Join of Eve's guess with the session verdict."""

    undetected: bool
    key_stolen: bool


def eve_success(report, eve: EveReport | None) -> EveSuccess:
    """Score one finished session: did Eve pass unnoticed, did she get the key?

    ``key_stolen`` compares against the net (post-sifting) session key; the
    all-groups metric lives in ``EveReport.full_key_correct``.
    """
    undetected = report.verdict == "accept"
    key_stolen = (
        eve is not None and report.alice_key != "" and eve.guessed_key == report.alice_key
    )
    return EveSuccess(undetected=undetected, key_stolen=key_stolen)

"""Pluggable Byzantine strategies.

A strategy decides, per (round, faulty sender, receiver), which value set the
faulty agent claims as its local set. Strategies see the whole instance (the
strongest adversary: full knowledge of all true inputs and the graph) but are
pure functions of their arguments plus the seed, so every execution replays
bit-for-bit. Equivocation (different lies to different receivers) is allowed;
forging the sender identity is not.

For the relay-based protocol a strategy also carries a relay policy applied
when the faulty agent is asked to forward someone else's message:
``corrupt`` (rewrite the payload), ``drop``, ``reroute`` (claim a bogus
route), or ``forward`` (behave honestly as a relay).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .redundancy import SetInstance
from .simnet import _mix

RELAY_POLICIES = ("forward", "corrupt", "drop", "reroute")

# behavior(round, sender, receiver, true_local_mask, inst) -> mask to send,
# or None for "send nothing" (the receiver's filter treats silence like the
# full universe: it manufactures no absences)
Behavior = Callable[[int, int, int, int, SetInstance], Optional[int]]


@dataclass(frozen=True)
class AdversaryStrategy:
    name: str
    behavior: Behavior
    relay_policy: str = "corrupt"

    def __post_init__(self):
        if self.relay_policy not in RELAY_POLICIES:
            raise ValueError(f"unknown relay policy {self.relay_policy!r}")

    def send_mask(self, rnd, sender, receiver, true_local, inst) -> Optional[int]:
        return self.behavior(rnd, sender, receiver, true_local, inst)

    def with_relay(self, policy: str) -> "AdversaryStrategy":
        return AdversaryStrategy(
            name=f"{self.name}+{policy}", behavior=self.behavior, relay_policy=policy
        )


def strategy_honest() -> AdversaryStrategy:
    """Baseline: faulty agents that follow the protocol."""
    return AdversaryStrategy(
        name="honest",
        behavior=lambda rnd, s, r, local, inst: local,
        relay_policy="forward",
    )


def strategy_constant(tokens) -> AdversaryStrategy:
    """Send the same fixed set to every receiver in every round."""
    fixed = frozenset(tokens)
    label = ",".join(sorted(fixed)) if fixed else "-"
    return AdversaryStrategy(
        name=f"constant:{label}",
        behavior=lambda rnd, s, r, local, inst: inst.universe.mask_of(fixed),
    )


def strategy_include_y(y: str) -> AdversaryStrategy:
    """Send the true local set with y forced in, making y look globally held."""

    def behavior(rnd, s, r, local, inst):
        return local | inst.universe.mask_of([y])

    return AdversaryStrategy(name=f"include_y:{y}", behavior=behavior)


def strategy_split_brain(target_partition, y: str) -> AdversaryStrategy:
    """The equivocation from the necessity constructions: receivers on the
    left side are told "everyone holds y", receivers on the right side get the
    sender's true set. Receivers in neither side get the true set as well."""
    left, right = (frozenset(target_partition[0]), frozenset(target_partition[1]))
    if left & right:
        raise ValueError("split-brain sides must be disjoint")

    def behavior(rnd, s, r, local, inst):
        if r in left:
            return local | inst.universe.mask_of([y])
        return local

    label = "".join(str(i) for i in sorted(left))
    return AdversaryStrategy(name=f"split_brain:{label}:{y}", behavior=behavior)


def strategy_random(seed: int) -> AdversaryStrategy:
    """Independent pseudo-random subset per (round, sender, receiver)."""

    def behavior(rnd, s, r, local, inst):
        sub = random.Random(_mix(seed, rnd, s, r))
        return sub.randint(0, inst.universe.full_mask)

    return AdversaryStrategy(name=f"random:{seed}", behavior=behavior)


def strategy_silent() -> AdversaryStrategy:
    """Withhold every message. The synchronous filter treats the omission as
    a full-universe claim, so silence never manufactures absences."""
    return AdversaryStrategy(
        name="silent",
        behavior=lambda rnd, s, r, local, inst: None,
        relay_policy="drop",
    )


def default_catalogue(universe_values, seeds=(101, 202)) -> list[AdversaryStrategy]:
    """The standard strategy sweep: honest baseline, both constant extremes,
    one include_y per universe value, and seeded random equivocators."""
    cat = [
        strategy_honest(),
        strategy_constant(universe_values),
        strategy_constant(()),
    ]
    cat.extend(strategy_include_y(v) for v in universe_values)
    cat.extend(strategy_random(s) for s in seeds)
    return cat


def relay_catalogue(universe_values, seeds=(303,)) -> list[AdversaryStrategy]:
    """Catalogue for the relay protocol: payload corruption, dropped relays,
    forged routes, and honest relaying with lying origins."""
    cat = [
        strategy_honest(),
        strategy_constant(universe_values).with_relay("corrupt"),
        strategy_constant(()).with_relay("drop"),
        strategy_constant(universe_values).with_relay("reroute"),
    ]
    cat.extend(strategy_include_y(v).with_relay("corrupt") for v in universe_values)
    cat.extend(strategy_random(s).with_relay("corrupt") for s in seeds)
    return cat


def strategy_by_name(name: str, args: list[str]) -> AdversaryStrategy:
    """Resolve an `adversary <name> [args]` scenario line."""
    if name == "honest":
        return strategy_honest()
    if name == "constant":
        return strategy_constant(args)
    if name == "include_y":
        if len(args) != 1:
            raise ValueError("include_y takes exactly one value")
        return strategy_include_y(args[0])
    if name == "split_brain":
        if len(args) < 3 or "/" not in args:
            raise ValueError("usage: adversary split_brain <left...> / <right...> <y>")
        cut = args.index("/")
        left = frozenset(int(a) for a in args[:cut])
        right = frozenset(int(a) for a in args[cut + 1:-1])
        return strategy_split_brain((left, right), args[-1])
    if name == "random":
        return strategy_random(int(args[0]) if args else 0)
    if name == "silent":
        return strategy_silent()
    raise ValueError(f"unknown adversary {name!r}")

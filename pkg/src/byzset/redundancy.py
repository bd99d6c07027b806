"""Set-intersection problem instances and redundancy property checkers.

Values are opaque ordered tokens; per-agent sets are stored as bitmasks over
the universe so every check is exact set algebra. Property C and
3f-redundancy share one absence-counting kernel parameterized by threshold.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional

from .graph import (
    BudgetExceededError,
    CommGraph,
    DEFAULT_BUDGET,
    bits,
    mask_of,
    possible_source_components,
    set_of,
    witness_reduced_graph,
)


class InstanceError(ValueError):
    """Malformed instance (unknown token, bad agent ids, empty query)."""


class GenerationError(ValueError):
    """The requested generator target is unsatisfiable at the given sizes."""


@dataclass(frozen=True)
class Universe:
    """Finite ordered list of distinct value tokens."""

    values: tuple[str, ...]

    def __post_init__(self):
        if not self.values:
            raise InstanceError("universe must be nonempty")
        if len(set(self.values)) != len(self.values):
            raise InstanceError("universe tokens must be distinct")

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: k for k, v in enumerate(self.values)}

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.values)) - 1

    def mask_of(self, tokens: Iterable[str]) -> int:
        m = 0
        for t in tokens:
            try:
                m |= 1 << self.index[t]
            except KeyError:
                raise InstanceError(f"token {t!r} not in universe") from None
        return m

    def tokens_of(self, mask: int) -> frozenset[str]:
        return frozenset(self.values[b] for b in bits(mask))


def default_universe(size: int) -> Universe:
    letters = string.ascii_lowercase
    if size <= len(letters):
        return Universe(tuple(letters[:size]))
    return Universe(tuple(f"v{i}" for i in range(size)))


@dataclass(frozen=True)
class SetInstance:
    """Per-agent local sets over a shared universe, plus the fault bound f."""

    universe: Universe
    locals_: tuple[int, ...]  # bitmask per agent, index = agent id
    f: int

    def __post_init__(self):
        for i, m in enumerate(self.locals_):
            if m & ~self.universe.full_mask:
                raise InstanceError(f"agent {i} local set leaves the universe")

    @classmethod
    def from_sets(
        cls, universe: Universe, locals_: Mapping[int, Iterable[str]], f: int
    ) -> "SetInstance":
        n = len(locals_)
        if sorted(locals_) != list(range(n)):
            raise InstanceError("agent ids must be dense 0..n-1")
        return cls(
            universe=universe,
            locals_=tuple(universe.mask_of(locals_[i]) for i in range(n)),
            f=f,
        )

    @property
    def n(self) -> int:
        return len(self.locals_)

    def local_mask(self, i: int) -> int:
        return self.locals_[i]

    def local_set(self, i: int) -> frozenset[str]:
        return self.universe.tokens_of(self.locals_[i])

    def intersection_mask(self, agents: Iterable[int]) -> int:
        m = self.universe.full_mask
        for i in agents:
            m &= self.locals_[i]
        return m


@dataclass(frozen=True)
class RedundancyVerdict:
    """holds plus, on failure, a (value, agent set) witness.

    Witness shapes: threshold failures carry (token, agents lacking the
    token); Property B failures carry (token, subset S whose intersection
    still contains it); an empty global intersection is flagged as
    (None, all agents); Property D failures carry (F, ReducedGraph,
    component, token).
    """

    holds: bool
    witness: object = None


def intersect(inst: SetInstance, agents: Iterable[int]) -> frozenset[str]:
    """Exact intersection of the named agents' local sets."""
    agents = sorted(set(agents))
    if not agents:
        raise InstanceError("cannot intersect an empty agent set")
    if agents[0] < 0 or agents[-1] >= inst.n:
        raise InstanceError("agent id out of range")
    return inst.universe.tokens_of(inst.intersection_mask(agents))


def check_property_b(inst: SetInstance) -> RedundancyVerdict:
    """Every subset of size >= n-2f pins the (nonempty) global intersection."""
    from itertools import combinations

    global_mask = inst.intersection_mask(range(inst.n))
    if global_mask == 0:
        return RedundancyVerdict(holds=False, witness=(None, frozenset(range(inst.n))))
    lo = max(inst.n - 2 * inst.f, 1)
    for size in range(lo, inst.n + 1):
        for combo in combinations(range(inst.n), size):
            m = inst.intersection_mask(combo)
            if m != global_mask:
                extra = m & ~global_mask
                token = inst.universe.values[next(bits(extra))]
                return RedundancyVerdict(holds=False, witness=(token, frozenset(combo)))
    return RedundancyVerdict(holds=True)


def absence_redundancy(inst: SetInstance, threshold: int) -> RedundancyVerdict:
    """Shared kernel: every value outside the global intersection must be
    absent from at least ``threshold`` local sets."""
    global_mask = inst.intersection_mask(range(inst.n))
    if global_mask == 0:
        return RedundancyVerdict(holds=False, witness=(None, frozenset(range(inst.n))))
    for b in bits(inst.universe.full_mask & ~global_mask):
        bit = 1 << b
        absent = frozenset(i for i in range(inst.n) if not inst.locals_[i] & bit)
        if len(absent) < threshold:
            return RedundancyVerdict(
                holds=False, witness=(inst.universe.values[b], absent)
            )
    return RedundancyVerdict(holds=True)


def check_property_c(inst: SetInstance) -> RedundancyVerdict:
    """2f-redundancy in the absence-counting form (threshold 2f+1)."""
    return absence_redundancy(inst, 2 * inst.f + 1)


def check_3f_redundancy(inst: SetInstance) -> RedundancyVerdict:
    """Asynchronous-strength redundancy (threshold 3f+1)."""
    return absence_redundancy(inst, 3 * inst.f + 1)


def equivalence_bc(inst: SetInstance) -> bool:
    """Test oracle: Property B and Property C agree on this instance."""
    return check_property_b(inst).holds == check_property_c(inst).holds


def check_property_d(
    inst: SetInstance, g: CommGraph, budget: int = DEFAULT_BUDGET
) -> RedundancyVerdict:
    """(f,G)-redundancy: for every fault set, every value outside the
    surviving intersection has a non-holder inside every source component of
    every reduced graph."""
    if g.n != inst.n:
        raise InstanceError("graph and instance disagree on the agent count")
    from .conditions import _fault_masks, _check_b_budget

    _check_b_budget(g.n, inst.f, budget)
    for fmask in _fault_masks(g.n, inst.f):
        survivors = g.full_mask & ~fmask
        if survivors == 0:
            continue
        surviving_int = inst.intersection_mask(bits(survivors))
        outside = inst.universe.full_mask & ~surviving_int
        if not outside:
            continue
        candidates = possible_source_components(g, fmask, inst.f)
        for b in bits(outside):
            bit = 1 << b
            for s in candidates:
                if all(inst.locals_[i] & bit for i in bits(s)):
                    rg = witness_reduced_graph(g, fmask, s)
                    return RedundancyVerdict(
                        holds=False,
                        witness=(set_of(fmask), rg, set_of(s), inst.universe.values[b]),
                    )
    return RedundancyVerdict(holds=True)


def recheck_property_d_witness(inst: SetInstance, g: CommGraph, witness: tuple) -> bool:
    """Independent witness validation through the literal decomposition path."""
    from .graph import decompose_scc, source_components

    faulty, rg, comp, token = witness
    if len(faulty) > inst.f:
        return False
    bit = 1 << inst.universe.index[token]
    survivors = [i for i in range(inst.n) if i not in faulty]
    if inst.intersection_mask(survivors) & bit:
        return False  # token not outside the surviving intersection
    if comp not in source_components(decompose_scc(rg)):
        return False
    if any(rg.deletion_at(i) > inst.f for i in rg.nodes):
        return False
    return all(inst.locals_[i] & bit for i in comp)


def generate_instance(
    universe_size: int,
    n: int,
    f: int,
    target: str,
    seed: int,
    graph: Optional[CommGraph] = None,
) -> SetInstance:
    """Deterministically generate an instance hitting the named target.

    Targets: satisfy_c, violate_c, satisfy_3f, satisfy_d (needs graph),
    equal_sets. The produced instance is checker-confirmed before return.
    """
    universe = default_universe(universe_size)
    rng = random.Random(seed)

    if target == "equal_sets":
        common = rng.randint(1, universe.full_mask)
        return SetInstance(universe, tuple([common] * n), f)

    if target in ("satisfy_c", "satisfy_3f"):
        threshold = 2 * f + 1 if target == "satisfy_c" else 3 * f + 1
        if n < threshold:
            raise GenerationError(f"{target} needs n >= {threshold}, got n={n}")
        inst = _generate_threshold(universe, n, f, threshold, rng)
        assert absence_redundancy(inst, threshold).holds
        return inst

    if target == "violate_c":
        if f == 0:
            raise GenerationError(
                "every instance with a nonempty intersection satisfies "
                "Property C at f=0"
            )
        if universe_size < 2 or n < 2:
            raise GenerationError("violate_c needs >= 2 values and >= 2 agents")
        core = 1 << rng.randrange(universe_size)
        weak_bit = 1 << rng.choice([b for b in range(universe_size) if not core & (1 << b)])
        absents = rng.sample(range(n), rng.randint(1, min(2 * f, n - 1)))
        locals_ = []
        for i in range(n):
            m = core
            if i not in absents:
                m |= weak_bit
            locals_.append(m)
        inst = SetInstance(universe, tuple(locals_), f)
        assert not check_property_c(inst).holds
        return inst

    if target == "satisfy_d":
        if graph is None:
            raise GenerationError("satisfy_d needs a communication graph")
        if n >= 2 * f + 1:
            for attempt in range(64):
                sub = random.Random(seed * 1000003 + attempt)
                inst = _generate_threshold(universe, n, f, 2 * f + 1, sub)
                if check_property_d(inst, graph).holds:
                    return inst
        # identical sets always satisfy Property D
        common = rng.randint(1, universe.full_mask)
        return SetInstance(universe, tuple([common] * n), f)

    raise GenerationError(f"unknown target {target!r}")


def _generate_threshold(
    universe: Universe, n: int, f: int, threshold: int, rng: random.Random
) -> SetInstance:
    """Instance whose every outside value is absent from >= threshold agents."""
    core_bits = rng.sample(range(universe.size), rng.randint(1, universe.size))
    core = mask_of(core_bits)
    locals_ = [core] * n
    for b in range(universe.size):
        bit = 1 << b
        if core & bit:
            continue
        holders = rng.sample(range(n), rng.randint(0, n - threshold))
        for i in holders:
            locals_[i] |= bit
    return SetInstance(universe, tuple(locals_), f)

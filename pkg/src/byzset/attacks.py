"""Impossibility constructions: scenario pairs a victim cannot tell apart.

Each builder produces two executions on the same graph whose correct outputs
differ, yet whose transcripts look identical to a designated victim agent.
Running both and checking view equality demonstrates operationally that no
deterministic output rule local to the victim can be correct in both - the
operational form of the necessity arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

from .adversary import AdversaryStrategy, strategy_constant, strategy_split_brain
from .conditions import check_condition_a
from .graph import CommGraph, GraphError, bits, mask_of, possible_source_components, set_of
from .protocols import ConstrainedProtocol, non_faulty_intersection
from .redundancy import SetInstance, Universe
from . import simnet


@dataclass(frozen=True)
class ScenarioPair:
    """Two runnable executions indistinguishable to ``victim``."""

    graph: CommGraph
    victim: int
    inst_a: SetInstance
    faulty_a: frozenset[int]
    adversary_a: AdversaryStrategy
    inst_b: SetInstance
    faulty_b: frozenset[int]
    adversary_b: AdversaryStrategy

    def targets(self):
        return (
            self.inst_a.universe.tokens_of(
                non_faulty_intersection(self.inst_a, self.faulty_a)
            ),
            self.inst_b.universe.tokens_of(
                non_faulty_intersection(self.inst_b, self.faulty_b)
            ),
        )

    def run(self, max_rounds=None):
        # both executions observe the same fixed round window: the engine's
        # early convergence stop is global knowledge no agent has
        max_rounds = max_rounds if max_rounds is not None else self.graph.n
        protocol = ConstrainedProtocol(stop_at_convergence=False)
        _, t1 = simnet.run_sync(
            self.graph, protocol, self.inst_a,
            self.faulty_a, self.adversary_a, max_rounds,
        )
        _, t2 = simnet.run_sync(
            self.graph, protocol, self.inst_b,
            self.faulty_b, self.adversary_b, max_rounds,
        )
        return t1, t2


def _two_value_instance(n: int, f: int, holders, y="y") -> SetInstance:
    universe = Universe(("a", y))
    hold = frozenset(holders)
    locals_ = tuple(
        universe.mask_of({"a", y}) if i in hold else universe.mask_of({"a"})
        for i in range(n)
    )
    return SetInstance(universe=universe, locals_=locals_, f=f)


def condition_a_attack_pair(g: CommGraph, f: int) -> ScenarioPair:
    """Scenario pair for a graph violating Condition A (n >= 2f+2).

    Scenario a: the padded fault set equivocates so the cut-off side keeps
    seeing the disputed value as globally held; the true inputs drop it from
    2f+1 agents. Scenario b: the victim's few incoming neighbors from the
    opposite side are the liars and everyone truly holds the value. The
    victim's per-round view is identical in both.
    """
    if g.n < 2 * f + 2:
        raise GraphError("the construction needs n >= 2f+2")
    verdict = check_condition_a(g, f)
    if verdict.holds:
        raise GraphError("graph satisfies Condition A; nothing to attack")
    part = verdict.witness
    in_masks = g.in_masks

    def clause_a_violated(left, right):
        if len(right) < f + 1 or not left:
            return False
        rmask = mask_of(right)
        return all((in_masks[i] & rmask).bit_count() < f + 1 for i in left)

    if clause_a_violated(part.left, part.right):
        left, right = set(part.left), set(part.right)
    else:
        left, right = set(part.right), set(part.left)
    faulty = set(part.faulty)

    # pad the fault set to exactly f: prefer right-side nodes (keeping
    # |right| >= f+1), then left-side nodes (keeping left nonempty)
    need = f - len(faulty)
    for v in sorted(right, reverse=True):
        if need == 0 or len(right) - 1 < f + 1:
            break
        right.discard(v)
        faulty.add(v)
        need -= 1
    for v in sorted(left, reverse=True):
        if need == 0 or len(left) <= 1:
            break
        left.discard(v)
        faulty.add(v)
        need -= 1
    if need:
        raise GraphError("could not pad the fault set to size f")

    victim = min(left)
    inst_a = _two_value_instance(g.n, f, holders=left)
    inst_b = _two_value_instance(g.n, f, holders=range(g.n))
    faulty_b = frozenset(set_of(in_masks[victim]) & right)
    return ScenarioPair(
        graph=g,
        victim=victim,
        inst_a=inst_a,
        faulty_a=frozenset(faulty),
        adversary_a=strategy_split_brain((frozenset(left), frozenset(right)), "y"),
        inst_b=inst_b,
        faulty_b=faulty_b,
        adversary_b=strategy_constant({"a"}),
    )


def property_d_attack_pair(g: CommGraph, f: int) -> ScenarioPair:
    """Scenario pair from an instance violating (f,G)-redundancy.

    Finds a fault set and a realizable source component S with nonempty
    exterior, then builds the instance holding the disputed value exactly on
    S. Scenario a keeps the exterior truthful (value must go); scenario b
    makes the victim's exterior in-neighbors the liars (value must stay).
    """
    from .conditions import _fault_masks

    for fmask in _fault_masks(g.n, f):
        survivors = g.full_mask & ~fmask
        for s in possible_source_components(g, fmask, f):
            if survivors & ~s:
                component = set_of(s)
                faulty_a = set_of(fmask)
                victim = min(component)
                exterior = set_of(survivors & ~s)
                inst_a = _two_value_instance(g.n, f, holders=component)
                inst_b = _two_value_instance(g.n, f, holders=range(g.n))
                faulty_b = frozenset(set_of(g.in_masks[victim]) & exterior)
                return ScenarioPair(
                    graph=g,
                    victim=victim,
                    inst_a=inst_a,
                    faulty_a=faulty_a,
                    adversary_a=strategy_split_brain(
                        (frozenset(component), frozenset(exterior)), "y"
                    ),
                    inst_b=inst_b,
                    faulty_b=faulty_b,
                    adversary_b=strategy_constant({"a"}),
                )
    raise GraphError(
        "no realizable source component with nonempty exterior; "
        "every instance on this graph satisfies (f,G)-redundancy"
    )


def verify_pair(pair: ScenarioPair, max_rounds=None):
    """Run both scenarios; return (indistinguishable_at_victim, targets)."""
    t1, t2 = pair.run(max_rounds)
    same = simnet.indistinguishable(t1, t2, pair.victim)
    return same, pair.targets()

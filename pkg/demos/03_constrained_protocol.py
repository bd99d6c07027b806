#!/usr/bin/env python3
"""The iterative constrained protocol, round by round: the lying agent keeps
claiming value b is everywhere, and the absence filter removes it anyway."""

from byzset import (
    SetInstance,
    complete_graph,
    run_centralized,
    strategy_include_y,
)
from byzset.protocols import ConstrainedProtocol, non_faulty_intersection
from byzset.redundancy import default_universe
from byzset.simnet import run_sync

inst = SetInstance.from_sets(
    default_universe(2),
    {0: {"a"}, 1: {"a"}, 2: {"a", "b"}, 3: {"a", "b"}, 4: {"a"}},
    f=1,
)
g = complete_graph(5)
faulty = {4}
adversary = strategy_include_y("b")

target = inst.universe.tokens_of(non_faulty_intersection(inst, faulty))
print("true locals:", {i: sorted(inst.local_set(i)) for i in range(5)})
print("faulty agent: 4, strategy:", adversary.name)
print("non-faulty intersection (the goal):", sorted(target))
print()

outcome, transcript = run_sync(g, ConstrainedProtocol(), inst, faulty, adversary, 5)
print("transcript:")
for line in transcript.dump().splitlines():
    step, kind = line.split()[:2]
    if kind in ("state_change", "decide"):
        print("  " + line)
print()
print(f"converged={outcome.converged} in {outcome.rounds_elapsed} round(s)")
print("decided:", {i: sorted(v) for i, v in sorted(outcome.decided.items())})

print()
print("=== the centralized baseline needs no rounds at all ===")
reports = {i: inst.local_set(i) for i in range(5)}
reports[4] = {"a", "b"}  # the same lie, told to the server
print("server output:", sorted(run_centralized(inst, reports)))

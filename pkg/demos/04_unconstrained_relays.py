#!/usr/bin/env python3
"""Disjoint-path flooding: source-routed copies outvote corrupted relays, and
a direct edge always beats whatever the relays did to their copies."""

from byzset import (
    complete_graph,
    disjoint_paths,
    generate_instance,
    run_unconstrained,
    strategy_constant,
)
from byzset.protocols import UnconstrainedProtocol, non_faulty_intersection
from byzset.simnet import run_sync

g = complete_graph(4)
f = 1

print("=== internally vertex-disjoint routes (Menger in action) ===")
ps = disjoint_paths(g, 0, 1, 2 * f + 1)
for p in ps.paths:
    print("  route:", " -> ".join(map(str, p)))

inst = generate_instance(3, 4, f, "satisfy_c", seed=5)
print()
print("locals:", {i: sorted(inst.local_set(i)) for i in range(4)})

corrupting = strategy_constant(("a", "b", "c")).with_relay("corrupt")
print()
print("faulty agent 3 corrupts every relayed copy it touches "
      f"(strategy {corrupting.name})")
outcome = run_unconstrained(g, inst, {3}, corrupting)
target = inst.universe.tokens_of(non_faulty_intersection(inst, {3}))
print("target:", sorted(target))
print("decided:", {i: sorted(v) for i, v in sorted(outcome.decided.items())})
print("converged:", outcome.converged)

print()
print("=== what each receiver reconstructed ===")
machine = UnconstrainedProtocol().bind(g, inst, {3}, corrupting)


class _Prebound:
    def __init__(self, m):
        self.m = m

    def bind(self, *args):
        return self.m


run_sync(g, _Prebound(machine), inst, {3}, corrupting, g.n + 2)
stored = machine.stored_sets(0)
for j in sorted(stored):
    genuine = sorted(inst.local_set(j))
    got = sorted(inst.universe.tokens_of(stored[j]))
    tag = "exact" if j != 3 else "whatever the liar sent"
    print(f"  agent 0's view of agent {j}: {got} ({tag}; truth {genuine})")

#!/usr/bin/env python3
"""Tour of the graph machinery: decompositions, reduced graphs, and the two
equivalent resilience conditions with concrete witnesses."""

from byzset import (
    build_graph,
    complete_graph,
    cycle_graph,
    check_condition_a,
    check_condition_b,
    decompose_scc,
    enumerate_reduced_graphs,
    predicted_reduced_graph_count,
    source_components,
    vertex_connectivity,
)

print("=== decomposition and source components ===")
g = build_graph(5, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 4), (4, 2)])
d = decompose_scc(g)
print("graph edges:", sorted(g.edges))
print("strongly connected components:", [sorted(c) for c in d.components])
print("source components:", [sorted(c) for c in source_components(d)])

print()
print("=== reduced graphs: every way an adversary can blind incoming links ===")
k3 = complete_graph(3)
print("complete K3, no faulty agents, budget f=1:")
print("  predicted count:", predicted_reduced_graph_count(k3, set(), 1))
for idx, rg in enumerate(enumerate_reduced_graphs(k3, set(), 1)):
    if idx < 3:
        print(f"  reduced graph {idx}: surviving edges {sorted(rg.surviving_edges)}")
print("  ... (27 total)")

print()
print("=== Condition A vs Condition B ===")
for name, g, f in [
    ("complete K4", complete_graph(4), 1),
    ("directed 4-cycle", cycle_graph(4), 1),
]:
    a = check_condition_a(g, f)
    b = check_condition_b(g, f)
    print(f"{name}: Condition A holds={a.holds}, Condition B holds={b.holds}")
    if not a.holds:
        w = a.witness
        print(f"  partition witness: L={sorted(w.left)} R={sorted(w.right)} "
              f"F={sorted(w.faulty)} (nobody in L hears f+1 agents of R)")
    if not b.holds:
        faulty, rg, comp = b.witness
        removed = sorted(rg.base.edges - rg.surviving_edges)
        print(f"  reduced-graph witness: delete F={sorted(faulty)}, remove "
              f"edges {removed} -> source component {sorted(comp)} is too small")

print()
print("=== connectivity ===")
print("K4 vertex connectivity:", vertex_connectivity(complete_graph(4)))
print("4-cycle vertex connectivity:", vertex_connectivity(cycle_graph(4)))

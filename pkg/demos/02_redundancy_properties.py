#!/usr/bin/env python3
"""Input redundancy: what the local sets must look like before any protocol
stands a chance, and how each property is checked with witnesses."""

from byzset import (
    SetInstance,
    Universe,
    check_3f_redundancy,
    check_property_b,
    check_property_c,
    check_property_d,
    cycle_graph,
    complete_graph,
    generate_instance,
    intersect,
)

u = Universe(("a", "b"))
inst = SetInstance.from_sets(
    u, {0: {"a", "b"}, 1: {"a"}, 2: {"a"}, 3: {"a"}, 4: {"a"}}, f=1
)
print("locals:", {i: sorted(inst.local_set(i)) for i in range(5)})
print("global intersection:", sorted(intersect(inst, range(5))))

print()
print("Property B (every size n-2f subset pins the intersection):",
      check_property_b(inst).holds)
print("Property C (outsider values absent from >= 2f+1 agents):",
      check_property_c(inst).holds)
print("3f-redundancy (absent from >= 3f+1, the async strength):",
      check_3f_redundancy(inst).holds)

weak = SetInstance.from_sets(
    u, {0: {"a", "b"}, 1: {"a", "b"}, 2: {"a", "b"}, 3: {"a"}}, f=1
)
verdict = check_property_c(weak)
print()
print("weak instance Property C:", verdict.holds, "witness:", verdict.witness)
print("  (value b is absent from only", len(verdict.witness[1]),
      "agents; 2f+1 =", 2 * weak.f + 1, "needed)")

print()
print("=== topology-aware redundancy: Property D ===")
inst4 = SetInstance.from_sets(
    u, {0: {"a", "b"}, 1: {"a"}, 2: {"a"}, 3: {"a"}}, f=1
)
for name, g in [("complete K4", complete_graph(4)), ("4-cycle", cycle_graph(4))]:
    v = check_property_d(inst4, g)
    print(f"{name}: holds={v.holds}")
    if not v.holds:
        faulty, rg, comp, y = v.witness
        print(f"  witness: isolate component {sorted(comp)} (faults "
              f"{sorted(faulty)}); everyone there still holds {y!r}")

print()
print("=== generators ===")
gen = generate_instance(3, 5, 1, "satisfy_c", seed=7)
print("generated satisfy_c instance:",
      {i: sorted(gen.local_set(i)) for i in range(5)})
print("check:", check_property_c(gen).holds)

#!/usr/bin/env python3
"""Why the conditions are necessary: on a graph violating Condition A, two
executions with different correct answers look identical to the victim."""

from byzset import check_condition_a, cycle_graph
from byzset.attacks import condition_a_attack_pair
from byzset.simnet import indistinguishable, view_of

g = cycle_graph(4)
print("graph: directed 4-cycle, f=1")
print("Condition A holds:", check_condition_a(g, 1).holds)

pair = condition_a_attack_pair(g, 1)
print()
print("victim agent:", pair.victim)
print("scenario a: faulty =", sorted(pair.faulty_a),
      "locals =", {i: sorted(pair.inst_a.local_set(i)) for i in range(4)})
print("scenario b: faulty =", sorted(pair.faulty_b),
      "locals =", {i: sorted(pair.inst_b.local_set(i)) for i in range(4)})
ta, tb = pair.targets()
print("correct output in a:", sorted(ta), "| in b:", sorted(tb))

t1, t2 = pair.run()
print()
print("the victim's view, both scenarios side by side:")
for ea, eb in zip(view_of(t1, pair.victim), view_of(t2, pair.victim)):
    marker = "==" if ea == eb else "!!"
    print(f"  {marker} {ea}")

same = indistinguishable(t1, t2, pair.victim)
print()
print("indistinguishable at the victim:", same)
print("so any deterministic rule the victim applies gives one answer for "
      "two situations that require different ones.")

others = [
    i for i in range(4)
    if i != pair.victim and i not in pair.faulty_a and i not in pair.faulty_b
]
tells = [i for i in others if not indistinguishable(t1, t2, i)]
print("agents who could tell the difference (but can't help):", tells)

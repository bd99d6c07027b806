import random

import pytest

from byzset.adversary import strategy_honest, strategy_include_y, strategy_random
from byzset.attacks import (
    condition_a_attack_pair,
    property_d_attack_pair,
    verify_pair,
)
from byzset.conditions import check_condition_a
from byzset.graph import GraphError, build_graph, complete_graph, cycle_graph
from byzset.protocols import ConstrainedProtocol
from byzset.redundancy import (
    SetInstance,
    Universe,
    check_property_c,
    check_property_d,
    generate_instance,
)
from byzset.simnet import (
    DeliverySchedule,
    indistinguishable,
    run_async,
    run_sync,
    view_of,
)

UAB = Universe(("a", "b"))


def inst_of(universe, sets, f):
    return SetInstance.from_sets(universe, dict(enumerate(sets)), f)


class TestDeterminism:
    def test_sync_replay_identical(self):
        inst = generate_instance(3, 4, 1, "satisfy_c", seed=1)
        runs = [
            run_sync(
                complete_graph(4), ConstrainedProtocol(), inst, {3},
                strategy_random(5), 4,
            )
            for _ in range(2)
        ]
        assert runs[0][1].dump() == runs[1][1].dump()
        assert runs[0][0] == runs[1][0]

    def test_async_replay_identical(self):
        inst = generate_instance(3, 5, 1, "satisfy_3f", seed=6)
        sched = DeliverySchedule(seed=9, policy="random_delay", max_delay=5)
        runs = [
            run_async(
                complete_graph(5), ConstrainedProtocol(), inst, {4},
                strategy_random(3), sched,
            )
            for _ in range(2)
        ]
        assert runs[0][1].dump() == runs[1][1].dump()

    def test_different_schedule_seeds_same_decision(self):
        inst = generate_instance(3, 5, 1, "satisfy_3f", seed=6)
        decisions = []
        for seed in range(6):
            sched = DeliverySchedule(seed=seed, policy="random_delay", max_delay=4)
            outcome, _ = run_async(
                complete_graph(5), ConstrainedProtocol(), inst, {4},
                strategy_include_y("b"), sched,
            )
            decisions.append(tuple(sorted(outcome.decided.items())))
        assert len(set(decisions)) == 1

    def test_zero_round_transcript_round0_only(self):
        inst = inst_of(UAB, [{"a"}] * 4, 1)
        _, t = run_sync(
            complete_graph(4), ConstrainedProtocol(), inst, set(),
            strategy_honest(), 4,
        )
        assert all(e.step == 0 for e in t.events)
        assert {e.kind for e in t.events} == {"state_change", "decide"}


class TestSynchronousCompleteness:
    def test_one_delivery_per_edge_per_round(self):
        inst = generate_instance(2, 4, 1, "satisfy_c", seed=3)
        g = complete_graph(4)
        _, t = run_sync(g, ConstrainedProtocol(), inst, {2}, strategy_honest(), 3)
        rounds = {e.step for e in t.events if e.kind == "send"}
        for rnd in rounds:
            delivered = [
                (e.sender, e.receiver)
                for e in t.events
                if e.kind == "deliver" and e.step == rnd and e.sender not in {2}
            ]
            expected = [(i, j) for (i, j) in sorted(g.edges) if i != 2]
            assert sorted(delivered) == expected


class TestViews:
    def test_no_inputs_only_state_events(self):
        g = build_graph(2, [(0, 1)])
        inst = inst_of(UAB, [{"a"}, {"a", "b"}], 0)
        _, t = run_sync(g, ConstrainedProtocol(), inst, set(), strategy_honest(), 2)
        v = view_of(t, 0)
        assert all(kind in ("state_change", "decide") for _, kind, _, _ in v)

    def test_honest_view_one_delivery_per_neighbor_per_round(self):
        g = complete_graph(4)
        inst = generate_instance(2, 4, 1, "satisfy_c", seed=5)
        protocol = ConstrainedProtocol(stop_at_convergence=False)
        _, t = run_sync(g, protocol, inst, set(), strategy_honest(), 1)
        v = view_of(t, 0)
        deliveries = [e for e in v if e[1] == "deliver"]
        assert len(deliveries) == 3  # one per in-neighbor for the single round

    def test_reflexive_indistinguishability(self):
        inst = generate_instance(2, 4, 1, "satisfy_c", seed=8)
        _, t = run_sync(
            complete_graph(4), ConstrainedProtocol(), inst, {1},
            strategy_include_y("a"), 4,
        )
        assert indistinguishable(t, t, 0)


class TestFairness:
    def test_all_nonstarved_messages_delivered(self):
        inst = generate_instance(3, 5, 1, "satisfy_3f", seed=12)
        g = complete_graph(5)
        sched = DeliverySchedule(
            seed=4, policy="starve", max_delay=4, starved=frozenset({(0, 1)})
        )
        _, t = run_async(
            g, ConstrainedProtocol(), inst, {4}, strategy_include_y("a"), sched
        )
        starved_deliveries = [
            e for e in t.events
            if e.kind == "deliver" and (e.sender, e.receiver) == (0, 1)
        ]
        assert not starved_deliveries


class TestConditionAAttack:
    def test_four_cycle_pair(self):
        g = cycle_graph(4)
        pair = condition_a_attack_pair(g, 1)
        same, (ta, tb) = verify_pair(pair)
        assert same
        assert ta != tb

    def test_both_instances_satisfy_redundancy(self):
        pair = condition_a_attack_pair(cycle_graph(4), 1)
        assert check_property_c(pair.inst_a).holds
        assert check_property_c(pair.inst_b).holds

    def test_refuses_good_graph(self):
        with pytest.raises(GraphError):
            condition_a_attack_pair(complete_graph(4), 1)

    def test_random_violating_graphs(self):
        rng = random.Random(14)
        seen = 0
        while seen < 12:
            n = rng.randint(4, 6)
            g = build_graph(
                n,
                [
                    (i, j)
                    for i in range(n)
                    for j in range(n)
                    if i != j and rng.random() < 0.35
                ],
            )
            if check_condition_a(g, 1).holds:
                continue
            pair = condition_a_attack_pair(g, 1)
            same, (ta, tb) = verify_pair(pair)
            assert same and ta != tb
            seen += 1

    def test_neighbor_of_honest_side_distinguishes(self):
        g = cycle_graph(4)
        pair = condition_a_attack_pair(g, 1)
        t1, t2 = pair.run()
        distinguishers = [
            i
            for i in range(4)
            if i != pair.victim
            and i not in pair.faulty_a
            and i not in pair.faulty_b
            and not indistinguishable(t1, t2, i)
        ]
        assert distinguishers


class TestPropertyDAttack:
    def test_cycle_pair(self):
        pair = property_d_attack_pair(cycle_graph(4), 1)
        same, (ta, tb) = verify_pair(pair)
        assert same
        assert ta != tb

    def test_constructed_instance_violates_property_d(self):
        g = cycle_graph(4)
        pair = property_d_attack_pair(g, 1)
        assert not check_property_d(pair.inst_a, g).holds

    def test_works_even_on_condition_b_graphs(self):
        g = complete_graph(4)
        pair = property_d_attack_pair(g, 1)
        same, (ta, tb) = verify_pair(pair)
        assert same and ta != tb
        assert not check_property_d(pair.inst_a, g).holds

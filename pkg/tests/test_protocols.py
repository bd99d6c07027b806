import itertools
import random

import pytest

from byzset.adversary import (
    default_catalogue,
    strategy_constant,
    strategy_honest,
    strategy_include_y,
    strategy_random,
    strategy_silent,
)
from byzset.conditions import check_condition_a, vertex_connectivity
from byzset.graph import GraphError, build_graph, complete_graph, cycle_graph
from byzset.protocols import (
    NO_QUORUM,
    ConstrainedProtocol,
    UnconstrainedProtocol,
    constrained_update,
    non_faulty_intersection,
    run_centralized,
    run_constrained,
    run_constrained_async,
    run_unconstrained,
)
from byzset.redundancy import (
    SetInstance,
    Universe,
    check_property_c,
    generate_instance,
)
from byzset.simnet import DeliverySchedule, run_async, run_sync

U01 = Universe(("0", "1"))
UAB = Universe(("a", "b"))


def inst_of(universe, sets, f):
    return SetInstance.from_sets(universe, dict(enumerate(sets)), f)


def k5_golden_instance():
    return inst_of(
        U01, [{"0"}, {"0"}, {"0", "1"}, {"0", "1"}, {"0"}], 1
    )


class TestCentralized:
    def test_all_agree(self):
        inst = inst_of(UAB, [{"a"}] * 4, 1)
        reports = {i: frozenset({"a"}) for i in range(4)}
        assert run_centralized(inst, reports) == {"a"}

    def test_one_faulty_overreport(self):
        inst = inst_of(UAB, [{"a"}, {"a"}, {"a"}, {"a"}], 1)
        reports = {0: {"a"}, 1: {"a"}, 2: {"a"}, 3: {"a", "b"}}
        assert run_centralized(inst, reports) == {"a"}

    def test_missing_report_rejected(self):
        inst = inst_of(UAB, [{"a"}] * 3, 1)
        with pytest.raises(Exception):
            run_centralized(inst, {0: {"a"}, 1: {"a"}})

    def test_exhaustive_faulty_reports_two_values(self):
        """Over every Property-C instance shape (n=4, f=1, 2-value universe)
        and every faulty report, the output is the non-faulty intersection."""
        subsets = [frozenset(), {"a"}, {"b"}, {"a", "b"}]
        count = 0
        for locals_ in itertools.product(subsets, repeat=4):
            inst = inst_of(UAB, list(locals_), 1)
            if not check_property_c(inst).holds:
                continue
            for bad in range(4):
                honest = [i for i in range(4) if i != bad]
                expected = inst.universe.tokens_of(
                    inst.intersection_mask(honest)
                )
                for lie in subsets:
                    reports = {i: inst.local_set(i) for i in range(4)}
                    reports[bad] = lie
                    out = run_centralized(inst, reports)
                    assert out is not NO_QUORUM
                    assert out == expected
                    count += 1
        assert count > 100  # the sweep really exercised the oracle

    def test_qualifying_groups_agree(self):
        # every qualifying group yields the same set, so first-in-order is
        # observationally irrelevant
        inst = inst_of(UAB, [{"a"}, {"a"}, {"a"}, {"a", "b"}], 1)
        reports = {i: inst.local_set(i) for i in range(4)}
        outputs = set()
        n, f = 4, 1
        for group in itertools.combinations(range(n), n - f):
            masks = [inst.universe.mask_of(reports[i]) for i in group]
            subs = []
            for size in range(n - 2 * f, len(group) + 1):
                for sub in itertools.combinations(range(len(group)), size):
                    m = inst.universe.full_mask
                    for k in sub:
                        m &= masks[k]
                    subs.append(m)
            if len(set(subs)) == 1:
                outputs.add(subs[0])
        assert len(outputs) == 1


class TestConstrainedUpdate:
    def test_hand_count(self):
        u = U01
        local = u.mask_of({"0", "1"})
        received = {
            1: u.mask_of({"0"}),
            2: u.mask_of({"0"}),
            4: u.mask_of({"0", "1"}),
        }
        assert constrained_update(local, received, 1, 2) == u.mask_of({"0"})

    def test_no_absences(self):
        u = UAB
        local = u.mask_of({"a"})
        received = {j: u.mask_of({"a"}) for j in range(3)}
        assert constrained_update(local, received, 1) == local

    def test_empty_local(self):
        assert constrained_update(0, {1: 3}, 1) == 0

    def test_missing_neighbors_manufacture_no_absences(self):
        u = UAB
        local = u.mask_of({"a", "b"})
        assert constrained_update(local, {}, 1) == local


class TestRunConstrained:
    def test_k5_golden_walkthrough(self):
        inst = k5_golden_instance()
        outcome = run_constrained(
            complete_graph(5), inst, {4}, strategy_include_y("1")
        )
        assert outcome.converged
        assert outcome.rounds_elapsed == 1
        assert all(v == {"0"} for v in outcome.decided.values())
        assert set(outcome.decided) == {0, 1, 2, 3}

    def test_identical_locals_zero_rounds(self):
        inst = inst_of(UAB, [{"a"}] * 4, 1)
        outcome = run_constrained(complete_graph(4), inst, set(), strategy_honest())
        assert outcome.converged
        assert outcome.rounds_elapsed == 0

    def test_condition_a_violation_breaks_somewhere(self):
        g = cycle_graph(4)
        assert not check_condition_a(g, 1).holds
        inst = inst_of(UAB, [{"a", "b"}, {"a"}, {"a"}, {"a"}], 1)
        assert check_property_c(inst).holds
        failures = 0
        for bad in range(4):
            outcome = run_constrained(
                g, inst, {bad}, strategy_include_y("b"), max_rounds=8
            )
            target = inst.universe.tokens_of(
                non_faulty_intersection(inst, {bad})
            )
            if not outcome.converged or any(
                v != target for v in outcome.decided.values()
            ):
                failures += 1
        assert failures > 0

    def test_rejects_oversized_fault_set(self):
        inst = inst_of(UAB, [{"a"}] * 4, 1)
        with pytest.raises(GraphError):
            run_constrained(complete_graph(4), inst, {0, 1}, strategy_honest())

    def test_validity_monotone_locals(self):
        rng = random.Random(5)
        for _ in range(30):
            inst = generate_instance(3, 5, 1, "satisfy_c", seed=rng.randint(0, 9999))
            _, transcript = run_sync(
                complete_graph(5), ConstrainedProtocol(), inst, {4},
                strategy_random(7), 5,
            )
            current = {}
            for e in transcript.events:
                if e.kind == "state_change":
                    if e.sender in current:
                        assert e.payload & ~current[e.sender] == 0
                    current[e.sender] = e.payload

    def test_silent_adversary_certified_instance_converges(self):
        inst = generate_instance(3, 5, 1, "satisfy_c", seed=3)
        outcome = run_constrained(complete_graph(5), inst, {2}, strategy_silent())
        assert outcome.converged


class TestRunUnconstrained:
    def test_k4_property_c_all_fault_placements(self):
        g = complete_graph(4)
        inst = inst_of(UAB, [{"a", "b"}, {"a"}, {"a"}, {"a"}], 1)
        assert check_property_c(inst).holds
        for bad in range(4):
            target = inst.universe.tokens_of(non_faulty_intersection(inst, {bad}))
            for strat in [
                strategy_constant({"a", "b"}).with_relay("corrupt"),
                strategy_constant(()).with_relay("drop"),
                strategy_constant({"a", "b"}).with_relay("reroute"),
                strategy_include_y("b").with_relay("corrupt"),
            ]:
                outcome = run_unconstrained(g, inst, {bad}, strat)
                assert outcome.converged
                for i, v in outcome.decided.items():
                    assert v == target, (bad, strat.name, i)

    def test_no_faults_full_intersection(self):
        g = complete_graph(5)
        inst = generate_instance(3, 5, 1, "satisfy_c", seed=9)
        outcome = run_unconstrained(g, inst, set(), strategy_honest())
        target = inst.universe.tokens_of(non_faulty_intersection(inst, set()))
        assert outcome.converged
        assert all(v == target for v in outcome.decided.values())

    def test_direct_edge_beats_relay_corruption(self):
        g = complete_graph(4)
        inst = inst_of(UAB, [{"a", "b"}, {"a"}, {"a"}, {"a"}], 1)
        machine = UnconstrainedProtocol().bind(
            g, inst, {3}, strategy_constant({"b"}).with_relay("corrupt")
        )
        outcome, _ = run_sync(
            g, _Prebound(machine), inst, {3},
            strategy_constant({"b"}).with_relay("corrupt"), g.n + 2,
        )
        stored = machine.stored_sets(0)
        for j in (1, 2):
            assert inst.universe.tokens_of(stored[j]) == inst.local_set(j)

    def test_relay_integrity_for_all_honest_pairs(self):
        g = complete_graph(5)
        inst = generate_instance(3, 5, 1, "satisfy_c", seed=21)
        strat = strategy_random(11).with_relay("corrupt")
        machine = UnconstrainedProtocol().bind(g, inst, {2}, strat)
        run_sync(g, _Prebound(machine), inst, {2}, strat, g.n + 2)
        for i in machine.honest:
            stored = machine.stored_sets(i)
            for j in machine.honest:
                if j != i:
                    assert stored[j] == inst.local_mask(j)


class _Prebound:
    """Adapter to drive an already-bound machine through run_sync."""

    def __init__(self, machine):
        self.machine = machine

    def bind(self, g, inst, faulty, adversary):
        return self.machine


class TestRunAsync:
    def test_k6_converges_under_seeded_schedules(self):
        inst = generate_instance(3, 6, 1, "satisfy_3f", seed=4)
        g = complete_graph(6)
        target = inst.universe.tokens_of(non_faulty_intersection(inst, {5}))
        for seed in range(10):
            schedule = DeliverySchedule(seed=seed, policy="random_delay", max_delay=4)
            outcome = run_constrained_async(
                g, inst, {5}, strategy_include_y("b"), schedule
            )
            assert outcome.converged, seed
            assert all(v == target for v in outcome.decided.values())

    def test_synchronous_schedule_matches_sync_run(self):
        inst = generate_instance(3, 5, 1, "satisfy_3f", seed=8)
        g = complete_graph(5)
        sched = DeliverySchedule(seed=0, policy="synchronous")
        async_outcome = run_constrained_async(
            g, inst, {4}, strategy_constant({"a", "b", "c"}), sched
        )
        sync_outcome = run_constrained(
            g, inst, {4}, strategy_constant({"a", "b", "c"})
        )
        assert async_outcome.decided == sync_outcome.decided
        assert async_outcome.converged == sync_outcome.converged

    def test_starvation_still_decides(self):
        inst = generate_instance(3, 5, 1, "satisfy_3f", seed=2)
        g = complete_graph(5)
        # pick a starved honest link into agent 0
        schedule = DeliverySchedule(
            seed=3, policy="starve", max_delay=3, starved=frozenset({(1, 0)})
        )
        outcome = run_constrained_async(
            g, inst, {4}, strategy_include_y("a"), schedule
        )
        target = inst.universe.tokens_of(non_faulty_intersection(inst, {4}))
        assert outcome.converged
        assert all(v == target for v in outcome.decided.values())

    def test_unfair_schedule_rejected(self):
        inst = generate_instance(3, 5, 1, "satisfy_3f", seed=2)
        schedule = DeliverySchedule(
            seed=0, policy="starve",
            starved=frozenset({(1, 0), (2, 0)}),
        )
        with pytest.raises(ValueError):
            run_constrained_async(
                complete_graph(5), inst, {4}, strategy_honest(), schedule
            )

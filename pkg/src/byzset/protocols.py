"""The three set-intersection protocols.

* run_centralized: a trusted server cross-checks size-(n-f) report groups.
* constrained protocol: iterative absence-count removal, the only per-agent
  state being the shrinking local set. Synchronous rounds remove a value held
  locally once more than f incoming reports lack it; the asynchronous variant
  acts on the first |N_i^-| - f reports of each logical step.
* unconstrained protocol: source-routed flooding over internally
  vertex-disjoint paths, then a per-value <=f-absence filter.

Protocol bundles plug into byzset.simnet engines, which move the payloads and
record transcripts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .conditions import disjoint_paths
from .graph import CommGraph, GraphError, bits
from .redundancy import InstanceError, SetInstance
from . import simnet


class NoQuorum:
    """Returned by run_centralized when no report group passes the cross-check."""

    def __repr__(self):
        return "NoQuorum"


NO_QUORUM = NoQuorum()


@dataclass(frozen=True)
class ProtocolOutcome:
    decided: dict  # non-faulty agent -> frozenset of tokens
    rounds_elapsed: int
    converged: bool


@dataclass(frozen=True)
class RelayedMessage:
    """A source-routed copy of an origin's claimed local set.

    For honestly forwarded messages the path starts at the origin, ends at the
    final receiver, and follows graph edges; faulty relays may break all of
    that, which is exactly what receiver-side validation checks.
    """

    origin: int
    payload: int  # value-set mask
    path: tuple[int, ...]


@dataclass
class AgentState:
    id: int
    local: int
    inbox: dict = field(default_factory=dict)  # sender -> mask, current round
    round: int = 0
    decided: Optional[int] = None


def non_faulty_intersection(inst: SetInstance, faulty) -> int:
    survivors = [i for i in range(inst.n) if i not in faulty]
    return inst.intersection_mask(survivors)


def run_centralized(inst: SetInstance, reported: Mapping[int, frozenset]):
    """Server-side cross-check: scan size-(n-f) agent groups in lexicographic
    order; output the group intersection the first time every sub-group of
    size >= n-2f agrees on one set. Returns the value set, or NO_QUORUM."""
    n, f = inst.n, inst.f
    if sorted(reported) != list(range(n)):
        raise InstanceError("reports must cover every agent exactly once")
    masks = {i: inst.universe.mask_of(reported[i]) for i in reported}
    lo = max(n - 2 * f, 1)
    for group in itertools.combinations(range(n), n - f):
        expected = None
        consistent = True
        for size in range(lo, len(group) + 1):
            for sub in itertools.combinations(group, size):
                m = inst.universe.full_mask
                for i in sub:
                    m &= masks[i]
                if expected is None:
                    expected = m
                elif m != expected:
                    consistent = False
                    break
            if not consistent:
                break
        if consistent and expected is not None:
            return inst.universe.tokens_of(expected)
    return NO_QUORUM


def constrained_update(
    local: int, received: Mapping[int, int], f: int, threshold: Optional[int] = None
) -> int:
    """Drop every held value that at least ``threshold`` received reports lack.

    Neighbors missing from ``received`` contribute no absences (a withheld
    message counts like a full-universe claim). Default threshold is f+1, the
    paper's "more than f" rule.
    """
    if threshold is None:
        threshold = f + 1
    removed = 0
    for b in bits(local):
        bit = 1 << b
        absences = sum(1 for m in received.values() if not m & bit)
        if absences >= threshold:
            removed |= bit
    return local & ~removed


class _ConstrainedMachine:
    def __init__(self, g, inst, faulty, adversary, threshold, stop_at_convergence):
        self.g = g
        self.inst = inst
        self.faulty = frozenset(faulty)
        self.adversary = adversary
        self.threshold = threshold if threshold is not None else inst.f + 1
        self.stop_at_convergence = stop_at_convergence
        self.honest = [i for i in range(inst.n) if i not in self.faulty]
        self.states = {i: AgentState(id=i, local=inst.local_mask(i)) for i in self.honest}
        self.target = non_faulty_intersection(inst, self.faulty)

    def initial_states(self):
        return [(i, self.states[i].local) for i in self.honest]

    def converged_now(self):
        return all(s.local == self.target for s in self.states.values())

    def finished(self):
        return self.stop_at_convergence and self.converged_now()

    def outgoing(self, rnd):
        sends = []
        for i in range(self.inst.n):
            for r in bits(self.g.out_masks[i]):
                if i in self.faulty:
                    m = self.adversary.send_mask(
                        rnd, i, r, self.inst.local_mask(i), self.inst
                    )
                    if m is None:
                        continue  # withheld: absent from inboxes entirely
                else:
                    m = self.states[i].local
                sends.append((i, r, m))
        return sends

    def deliver_round(self, rnd, sends):
        inboxes = {i: {} for i in self.honest}
        for sender, receiver, payload in sends:
            if receiver in inboxes:
                inboxes[receiver][sender] = payload
        changes = []
        for i in self.honest:
            st = self.states[i]
            st.inbox = inboxes[i]
            new = constrained_update(st.local, st.inbox, self.inst.f, self.threshold)
            st.round = rnd + 1
            if new != st.local:
                st.local = new
                changes.append((i, new))
        return changes

    def outcome(self, rounds):
        decided = {
            i: self.inst.universe.tokens_of(self.states[i].local) for i in self.honest
        }
        return ProtocolOutcome(
            decided=decided, rounds_elapsed=rounds, converged=self.converged_now()
        )

    def decided_payload(self, agent):
        return self.states[agent].local


class _AsyncConstrainedMachine:
    """Quorum-driven variant: an agent acts on a logical step as soon as
    |N_i^-| - f reports for that step have arrived, never waiting for the
    last f. The removal rule is the same more-than-f absence count."""

    def __init__(self, g, inst, faulty, adversary, max_steps, threshold):
        self.g = g
        self.inst = inst
        self.faulty = frozenset(faulty)
        self.adversary = adversary
        self.max_steps = max_steps
        self.threshold = threshold if threshold is not None else inst.f + 1
        self.honest = [i for i in range(inst.n) if i not in self.faulty]
        self.states = {i: AgentState(id=i, local=inst.local_mask(i)) for i in self.honest}
        self.buffers = {i: {} for i in self.honest}  # step -> {sender: mask}
        self.target = non_faulty_intersection(inst, self.faulty)

    def initial_states(self):
        return [(i, self.states[i].local) for i in self.honest]

    def initial_sends(self):
        sends = []
        for i in self.honest:
            for r in bits(self.g.out_masks[i]):
                sends.append((i, r, 0, self.states[i].local))
        # Byzantine senders are not bound by the step discipline: they may
        # rush every tagged message up front
        for j in sorted(self.faulty):
            for tag in range(self.max_steps):
                for r in bits(self.g.out_masks[j]):
                    m = self.adversary.send_mask(
                        tag, j, r, self.inst.local_mask(j), self.inst
                    )
                    if m is not None:
                        sends.append((j, r, tag, m))
        return sends

    def receive(self, sender, receiver, tag, payload):
        if receiver not in self.buffers:
            return
        self.buffers[receiver].setdefault(tag, {}).setdefault(sender, payload)

    def _quorum(self, i):
        return max(self.g.in_masks[i].bit_count() - self.inst.f, 0)

    def finished(self):
        return all(s.local == self.target for s in self.states.values())

    def ready_steps(self):
        results = []
        progressed = True
        while progressed:
            progressed = False
            for i in self.honest:
                st = self.states[i]
                if st.round >= self.max_steps:
                    continue
                arrived = self.buffers[i].get(st.round, {})
                if len(arrived) < self._quorum(i):
                    continue
                new = constrained_update(st.local, arrived, self.inst.f, self.threshold)
                changed = new if new != st.local else None
                st.local = new
                st.round += 1
                sends = []
                if st.round < self.max_steps:
                    sends = [
                        (i, r, st.round, st.local) for r in bits(self.g.out_masks[i])
                    ]
                results.append((i, changed, sends))
                progressed = True
        return results

    def outcome(self):
        decided = {
            i: self.inst.universe.tokens_of(self.states[i].local) for i in self.honest
        }
        steps = max((s.round for s in self.states.values()), default=0)
        return ProtocolOutcome(
            decided=decided, rounds_elapsed=steps, converged=self.finished()
        )

    def decided_payload(self, agent):
        return self.states[agent].local


class ConstrainedProtocol:
    """Bundle for simnet engines; threshold None means the sync default f+1.

    ``stop_at_convergence=False`` runs the full round budget regardless of
    state - the engine's convergence stop is global meta-knowledge, so
    indistinguishability demonstrations must disable it.
    """

    kind = "constrained"

    def __init__(self, threshold: Optional[int] = None, stop_at_convergence=True):
        self.threshold = threshold
        self.stop_at_convergence = stop_at_convergence

    def bind(self, g, inst, faulty, adversary):
        return _ConstrainedMachine(
            g, inst, faulty, adversary, self.threshold, self.stop_at_convergence
        )

    def bind_async(self, g, inst, faulty, adversary, max_steps):
        return _AsyncConstrainedMachine(
            g, inst, faulty, adversary, max_steps, self.threshold
        )


def _valid_route(g, msg, receiver, sender):
    path = msg.path
    if len(path) < 2 or path[0] != msg.origin or path[-1] != receiver:
        return False
    if path[-2] != sender:
        return False
    if len(set(path)) != len(path):
        return False
    return all((path[k], path[k + 1]) in g.edges for k in range(len(path) - 1))


def _disjoint_support(paths, need):
    """True iff ``need`` of the given routes are pairwise internally disjoint."""
    if len(paths) < need:
        return False
    interiors = [set(p[1:-1]) for p in paths]
    for combo in itertools.combinations(range(len(paths)), need):
        ok = True
        for a in range(len(combo)):
            for b in range(a + 1, len(combo)):
                if interiors[combo[a]] & interiors[combo[b]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


class _RelayMachine:
    def __init__(self, g, inst, faulty, adversary, routes):
        self.g = g
        self.inst = inst
        self.faulty = frozenset(faulty)
        self.adversary = adversary
        self.routes = routes
        self.honest = [i for i in range(inst.n) if i not in self.faulty]
        self.locals = {i: inst.local_mask(i) for i in self.honest}
        # per final receiver: origin -> list of (path, payload) candidates
        self.candidates = {i: {} for i in self.honest}
        self.outbox = {i: [] for i in range(inst.n)}  # (next_hop, RelayedMessage)
        self.decisions: dict[int, int] = {}
        self.target = non_faulty_intersection(inst, self.faulty)
        self._inject_origins()
        if not any(self.outbox.values()):  # degenerate: nothing to relay
            self._decide()

    def _origin_payload(self, origin, dest):
        if origin in self.faulty:
            m = self.adversary.send_mask(
                0, origin, dest, self.inst.local_mask(origin), self.inst
            )
            return m  # None: withheld flood
        return self.locals[origin]

    def _inject_origins(self):
        for origin in range(self.inst.n):
            for dest in range(self.inst.n):
                if dest == origin:
                    continue
                payload = self._origin_payload(origin, dest)
                if payload is None:
                    continue
                for path in self.routes[(origin, dest)].paths:
                    msg = RelayedMessage(origin=origin, payload=payload, path=path)
                    self.outbox[origin].append((path[1], msg))

    def initial_states(self):
        return [(i, self.locals[i]) for i in self.honest]

    def finished(self):
        return bool(self.decisions) or not any(self.outbox.values())

    def outgoing(self, rnd):
        bundles = {}
        for sender in range(self.inst.n):
            for next_hop, msg in self.outbox[sender]:
                bundles.setdefault((sender, next_hop), []).append(msg)
            self.outbox[sender] = []
        return [(s, r, tuple(msgs)) for (s, r), msgs in sorted(bundles.items())]

    def _relay(self, rnd, relay, msg, pos):
        """Stage the forward of ``msg`` sitting at path position ``pos``."""
        next_hop = msg.path[pos + 1]
        # nobody, honest or faulty, can transmit on a nonexistent channel
        if (relay, next_hop) not in self.g.edges:
            return
        if relay not in self.faulty:
            self.outbox[relay].append((next_hop, msg))
            return
        policy = self.adversary.relay_policy
        if policy == "forward":
            self.outbox[relay].append((next_hop, msg))
            return
        if policy == "drop":
            return
        dest = msg.path[-1]
        lie = self.adversary.send_mask(
            rnd, relay, dest, self.inst.local_mask(relay), self.inst
        )
        if lie is None:
            return
        if policy == "corrupt":
            forged = RelayedMessage(origin=msg.origin, payload=lie, path=msg.path)
            self.outbox[relay].append((next_hop, forged))
        elif policy == "reroute":
            # claim a short fabricated route; only deliverable if the final
            # edge really exists, otherwise receivers would unmask the relay
            if (relay, dest) in self.g.edges:
                forged = RelayedMessage(
                    origin=msg.origin, payload=lie, path=(msg.origin, relay, dest)
                )
                self.outbox[relay].append((dest, forged))

    def deliver_round(self, rnd, sends):
        for sender, receiver, bundle in sends:
            for msg in bundle:
                path = msg.path
                # locate this hop on the claimed route
                pos = None
                for k in range(len(path) - 1):
                    if path[k] == sender and path[k + 1] == receiver:
                        pos = k + 1
                        break
                if pos is None:
                    continue  # unusable claim, ignore
                if pos == len(path) - 1:
                    if receiver in self.candidates and _valid_route(
                        self.g, msg, receiver, sender
                    ):
                        entry = (path, msg.payload)
                        bucket = self.candidates[receiver].setdefault(msg.origin, [])
                        if entry not in bucket:
                            bucket.append(entry)
                else:
                    self._relay(rnd, receiver, msg, pos)
        if not any(self.outbox.values()):
            self._decide()
        return []  # relay phase changes no local sets

    def _resolve(self, receiver, origin):
        got = self.candidates[receiver].get(origin, [])
        direct = [p for path, p in got if len(path) == 2]
        if direct:
            return direct[0]
        by_payload = {}
        for path, payload in got:
            if len(path) >= 3:
                by_payload.setdefault(payload, []).append(path)
        qualifying = [
            payload
            for payload, paths in sorted(by_payload.items())
            if _disjoint_support(paths, self.inst.f + 1)
        ]
        return qualifying[0] if qualifying else 0

    def _decide(self):
        f = self.inst.f
        for i in self.honest:
            stored = {
                j: self._resolve(i, j) for j in range(self.inst.n) if j != i
            }
            out = 0
            for b in bits(self.locals[i]):
                bit = 1 << b
                absences = sum(1 for m in stored.values() if not m & bit)
                if absences <= f:
                    out |= bit
            self.decisions[i] = out

    def stored_sets(self, receiver):
        """Post-run view of the Z sets one agent reconstructed (test hook)."""
        return {
            j: self._resolve(receiver, j)
            for j in range(self.inst.n)
            if j != receiver
        }

    def outcome(self, rounds):
        decided = {
            i: self.inst.universe.tokens_of(self.decisions.get(i, 0))
            for i in self.honest
        }
        converged = bool(self.decisions) and all(
            self.decisions[i] == self.target for i in self.honest
        )
        return ProtocolOutcome(
            decided=decided, rounds_elapsed=rounds, converged=converged
        )

    def decided_payload(self, agent):
        return self.decisions.get(agent, 0)


class UnconstrainedProtocol:
    """Disjoint-path flooding with the <=f-absence output filter.

    Routes are precomputed from the graph (source routing) and may be shared
    across runs on the same graph; callers are responsible for certifying
    (2f+1)-connectivity.
    """

    kind = "unconstrained"

    def __init__(self, shared_routes: Optional[dict] = None):
        self.shared_routes = shared_routes

    @staticmethod
    def compute_routes(g: CommGraph, f: int) -> dict:
        routes = {}
        for origin in range(g.n):
            for dest in range(g.n):
                if origin != dest:
                    routes[(origin, dest)] = disjoint_paths(
                        g, origin, dest, 2 * f + 1
                    )
        return routes

    def bind(self, g, inst, faulty, adversary):
        routes = self.shared_routes
        if routes is None:
            routes = self.compute_routes(g, inst.f)
        return _RelayMachine(g, inst, faulty, adversary, routes)


def run_constrained(
    g: CommGraph,
    inst: SetInstance,
    faulty,
    adversary,
    max_rounds: Optional[int] = None,
) -> ProtocolOutcome:
    """Synchronous constrained protocol; non-faulty agents use the f+1 rule."""
    faulty = frozenset(faulty)
    if len(faulty) > inst.f:
        raise GraphError(f"|F|={len(faulty)} exceeds f={inst.f}")
    if max_rounds is None:
        max_rounds = g.n  # strictly above the n-2f bound, so stalls show up
    outcome, _ = simnet.run_sync(
        g, ConstrainedProtocol(), inst, faulty, adversary, max_rounds
    )
    return outcome


def run_unconstrained(g: CommGraph, inst: SetInstance, faulty, adversary) -> ProtocolOutcome:
    """Relay-flooding protocol; caller certifies (2f+1)-connectivity."""
    faulty = frozenset(faulty)
    if len(faulty) > inst.f:
        raise GraphError(f"|F|={len(faulty)} exceeds f={inst.f}")
    outcome, _ = simnet.run_sync(
        g, UnconstrainedProtocol(), inst, faulty, adversary, max_rounds=g.n + 2
    )
    return outcome


def run_constrained_async(
    g: CommGraph,
    inst: SetInstance,
    faulty,
    adversary,
    schedule,
    max_steps: Optional[int] = None,
) -> ProtocolOutcome:
    """Asynchronous constrained protocol under a fair delivery schedule."""
    faulty = frozenset(faulty)
    if len(faulty) > inst.f:
        raise GraphError(f"|F|={len(faulty)} exceeds f={inst.f}")
    outcome, _ = simnet.run_async(
        g, ConstrainedProtocol(), inst, faulty, adversary, schedule, max_steps
    )
    return outcome

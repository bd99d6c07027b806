"""Deterministic message-passing engine with transcript capture.

Synchronous mode runs closed lock-step rounds (all sends, then all
deliveries, then all state updates). Asynchronous mode drives the same agents
from a logical-clock event queue under a fair, seeded delivery schedule.
Transcripts record every send, delivery, state change, and decision, and two
transcripts can be compared through the eyes of a single agent
(indistinguishability).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .graph import CommGraph
from .redundancy import Universe


def _mix(*parts: int) -> int:
    """Deterministic 64-bit integer hash of the given parts."""
    h = 0x9E3779B97F4A7C15
    for p in parts:
        h ^= (p + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        h = (h * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        h ^= h >> 31
    return h


SEND = "send"
DELIVER = "deliver"
STATE = "state_change"
DECIDE = "decide"


@dataclass(frozen=True)
class Event:
    step: int
    kind: str  # send | deliver | state_change | decide
    sender: int
    receiver: int
    payload: object  # value-set mask or tuple of relayed messages


@dataclass
class Transcript:
    """Ordered event log of one execution."""

    universe: Universe
    events: list[Event] = field(default_factory=list)

    def append(self, step, kind, sender, receiver, payload):
        self.events.append(Event(step, kind, sender, receiver, payload))

    def payload_str(self, payload) -> str:
        if isinstance(payload, int):
            return "{" + ",".join(sorted(self.universe.tokens_of(payload))) + "}"
        if isinstance(payload, tuple):
            return "[" + "|".join(self._relayed_str(m) for m in payload) + "]"
        return str(payload)

    def _relayed_str(self, m) -> str:
        route = ">".join(str(v) for v in m.path)
        return f"{route}:{self.payload_str(m.payload)}"

    def dump(self) -> str:
        lines = [
            f"{e.step} {e.kind} {e.sender} {e.receiver} {self.payload_str(e.payload)}"
            for e in self.events
        ]
        return "\n".join(lines) + "\n"


def view_of(t: Transcript, agent: int) -> tuple:
    """The event subsequence observable by one agent: its deliveries plus its
    own state changes and decisions, payloads only."""
    out = []
    for e in t.events:
        if e.kind == DELIVER and e.receiver == agent:
            out.append((e.step, DELIVER, e.sender, t.payload_str(e.payload)))
        elif e.kind in (STATE, DECIDE) and e.receiver == agent:
            out.append((e.step, e.kind, agent, t.payload_str(e.payload)))
    return tuple(out)


def indistinguishable(t1: Transcript, t2: Transcript, agent: int) -> bool:
    """True iff the two executions look element-wise identical to ``agent``."""
    return view_of(t1, agent) == view_of(t2, agent)


@dataclass(frozen=True)
class DeliverySchedule:
    """Fair asynchronous delivery policy, deterministic in the seed.

    Policies: ``synchronous`` (unit delays), ``random_delay`` (seeded delays
    in 1..max_delay), ``starve`` (the given links never deliver; at most f
    such links may point at any one receiver).
    """

    seed: int
    policy: str = "synchronous"
    max_delay: int = 3
    starved: frozenset[tuple[int, int]] = frozenset()

    def delay(self, sender: int, receiver: int, tag: int) -> Optional[int]:
        if (sender, receiver) in self.starved:
            return None
        if self.policy == "synchronous":
            return 1
        if self.policy in ("random_delay", "starve"):
            return 1 + _mix(self.seed, sender, receiver, tag) % self.max_delay
        raise ValueError(f"unknown policy {self.policy!r}")

    def tiebreak(self, sender: int, receiver: int, tag: int) -> int:
        return _mix(self.seed ^ 0xDADA, sender, receiver, tag)


def validate_schedule(schedule: DeliverySchedule, g: CommGraph, f: int) -> None:
    """Reject unfair schedules: more than f starved links into one receiver
    would let silence outweigh the fault bound."""
    per_receiver: dict[int, int] = {}
    for s, r in schedule.starved:
        if (s, r) not in g.edges:
            raise ValueError(f"starved link ({s},{r}) is not a graph edge")
        per_receiver[r] = per_receiver.get(r, 0) + 1
    for r, count in per_receiver.items():
        if count > f:
            raise ValueError(
                f"schedule starves {count} links into agent {r}, tolerance is {f}"
            )


def run_sync(g, protocol, inst, faulty, adversary, max_rounds):
    """Run a protocol in closed synchronous rounds.

    ``protocol`` is one of the protocol bundles from byzset.protocols; the
    engine only moves payloads and records events. Returns
    (ProtocolOutcome, Transcript).
    """
    machine = protocol.bind(g, inst, faulty, adversary)
    t = Transcript(universe=inst.universe)
    for agent, payload in machine.initial_states():
        t.append(0, STATE, agent, agent, payload)
    rnd = 0
    while True:
        if machine.finished() or rnd >= max_rounds:
            break
        sends = machine.outgoing(rnd)
        for sender, receiver, payload in sends:
            t.append(rnd, SEND, sender, receiver, payload)
        for sender, receiver, payload in sends:
            t.append(rnd, DELIVER, sender, receiver, payload)
        for agent, payload in machine.deliver_round(rnd, sends):
            t.append(rnd + 1, STATE, agent, agent, payload)
        rnd += 1
    outcome = machine.outcome(rnd)
    for agent in sorted(outcome.decided):
        t.append(rnd, DECIDE, agent, agent, machine.decided_payload(agent))
    return outcome, t


def run_async(g, protocol, inst, faulty, adversary, schedule, max_steps=None):
    """Event-driven run under a fair delivery schedule.

    Deliveries are ordered by (logical time, seeded tiebreak); all messages
    arriving at the same instant are handed to the agent together, so the
    degenerate all-equal-delay schedule reproduces the synchronous rounds.
    Returns (ProtocolOutcome, Transcript).
    """
    validate_schedule(schedule, g, inst.f)
    if max_steps is None:
        max_steps = g.n
    machine = protocol.bind_async(g, inst, faulty, adversary, max_steps)
    t = Transcript(universe=inst.universe)
    for agent, payload in machine.initial_states():
        t.append(0, STATE, agent, agent, payload)

    queue: list[tuple[int, int, int, int, int, int, object]] = []
    seq = 0

    def push(now, sender, receiver, tag, payload):
        nonlocal seq
        d = schedule.delay(sender, receiver, tag)
        if d is None:
            return
        heapq.heappush(
            queue,
            (now + d, schedule.tiebreak(sender, receiver, tag), seq,
             sender, receiver, tag, payload),
        )
        seq += 1

    for sender, receiver, tag, payload in machine.initial_sends():
        push(0, sender, receiver, tag, payload)

    now = 0
    while queue and not machine.finished():
        now = queue[0][0]
        batch = []
        while queue and queue[0][0] == now:
            batch.append(heapq.heappop(queue))
        for _, _, _, sender, receiver, tag, payload in batch:
            t.append(now, DELIVER, sender, receiver, payload)
            machine.receive(sender, receiver, tag, payload)
        for agent, payload, new_sends in machine.ready_steps():
            if payload is not None:  # None: the step changed nothing
                t.append(now, STATE, agent, agent, payload)
            for sender, receiver, tag, out_payload in new_sends:
                push(now, sender, receiver, tag, out_payload)

    outcome = machine.outcome()
    for agent in sorted(outcome.decided):
        t.append(now, DECIDE, agent, agent, machine.decided_payload(agent))
    return outcome, t

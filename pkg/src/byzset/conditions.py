"""Graph-condition checkers with machine-checkable witnesses.

Condition A is the partition-based in-neighbor threshold condition; Condition B
is its equivalent in terms of source components of reduced graphs. Both come
with witnesses that re-validate independently of the checking path. Vertex
connectivity and internally vertex-disjoint paths are computed by
node-splitting maximum flow.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .graph import (
    BudgetExceededError,
    CommGraph,
    DEFAULT_BUDGET,
    GraphError,
    Partition,
    ReducedGraph,
    _partition_masks,
    bits,
    decompose_scc,
    possible_source_components,
    set_of,
    source_components,
    witness_reduced_graph,
)


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of a condition check.

    When ``holds`` is false, ``witness`` carries the counterexample:
      - Condition A / async condition: a Partition violating one clause
      - Condition B: an (F, ReducedGraph, source component) triple
      - connectivity: a separating vertex set
    """

    holds: bool
    witness: object = None


@dataclass(frozen=True)
class DisjointPathSet:
    """Internally vertex-disjoint directed paths from source to sink."""

    source: int
    sink: int
    paths: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen_internal: set[int] = set()
        for p in self.paths:
            if p[0] != self.source or p[-1] != self.sink:
                raise GraphError(f"path {p} does not join {self.source}->{self.sink}")
            interior = set(p[1:-1])
            if seen_internal & interior:
                raise GraphError("paths are not internally vertex-disjoint")
            seen_internal |= interior


def _partition_violation(g: CommGraph, f: int, quota: int) -> Optional[tuple[int, int, int, str]]:
    """First partition violating the threshold condition with the given quota,
    or None. Clauses quantifying over an empty side are vacuously true."""
    in_masks = g.in_masks
    for l, r, fl in _partition_masks(g.n, f):
        if r.bit_count() >= quota and l:
            if not any((in_masks[i] & r).bit_count() >= quota for i in bits(l)):
                return (l, r, fl, "a")
        if l.bit_count() >= quota and r:
            if not any((in_masks[i] & l).bit_count() >= quota for i in bits(r)):
                return (l, r, fl, "b")
    return None


def check_condition_a(g: CommGraph, f: int) -> ConditionVerdict:
    """Condition A: for every partition (L, R, F) with |F| <= f, each side of
    size >= f+1 is heard by some agent on the other side through >= f+1
    incoming neighbors."""
    bad = _partition_violation(g, f, f + 1)
    if bad is None:
        return ConditionVerdict(holds=True)
    l, r, fl, _ = bad
    return ConditionVerdict(
        holds=False,
        witness=Partition(left=set_of(l), right=set_of(r), faulty=set_of(fl)),
    )


def check_condition_async(g: CommGraph, f: int) -> ConditionVerdict:
    """Asynchronous analogue of Condition A with thresholds 2f+1."""
    bad = _partition_violation(g, f, 2 * f + 1)
    if bad is None:
        return ConditionVerdict(holds=True)
    l, r, fl, _ = bad
    return ConditionVerdict(
        holds=False,
        witness=Partition(left=set_of(l), right=set_of(r), faulty=set_of(fl)),
    )


def partition_violates_condition(g: CommGraph, f: int, p: Partition, quota: int) -> bool:
    """Re-check a witness partition independently of enumeration order."""
    if len(p.faulty) > f:
        return False
    in_masks = g.in_masks
    l = sum(1 << i for i in p.left)
    r = sum(1 << i for i in p.right)
    if len(p.right) >= quota and p.left:
        if not any((in_masks[i] & r).bit_count() >= quota for i in p.left):
            return True
    if len(p.left) >= quota and p.right:
        if not any((in_masks[i] & l).bit_count() >= quota for i in p.right):
            return True
    return False


def _fault_masks(n: int, f: int) -> list[int]:
    """All |F| <= f fault masks ordered by (size, mask)."""
    from itertools import combinations

    out = []
    for size in range(min(f, n) + 1):
        out.extend(sorted(sum(1 << i for i in c) for c in combinations(range(n), size)))
    return out


def _check_b_budget(n: int, f: int, budget: int) -> None:
    work = sum(2 ** (n - m.bit_count()) for m in _fault_masks(n, f))
    if work > budget:
        raise BudgetExceededError(
            f"condition B check needs ~{work} subset probes, budget {budget}"
        )


def check_condition_b(
    g: CommGraph, f: int, budget: int = DEFAULT_BUDGET
) -> ConditionVerdict:
    """Condition B: every source component of every reduced graph, over every
    fault set of size <= f, has size >= n - 2f.

    Candidate source components are enumerated through their closed-form
    characterization (strongly connected induced subgraph whose members each
    have <= f external surviving in-neighbors); the witness is materialized as
    a concrete reduced graph.
    """
    _check_b_budget(g.n, f, budget)
    floor = g.n - 2 * f
    for fmask in _fault_masks(g.n, f):
        for s in possible_source_components(g, fmask, f, max_size=floor - 1):
            rg = witness_reduced_graph(g, fmask, s)
            return ConditionVerdict(
                holds=False, witness=(set_of(fmask), rg, set_of(s))
            )
    return ConditionVerdict(holds=True)


def reduced_graph_violates_b(g: CommGraph, f: int, witness: tuple) -> bool:
    """Independent re-check of a Condition B witness via the literal
    decomposition pipeline."""
    faulty, rg, comp = witness
    if len(faulty) > f or not isinstance(rg, ReducedGraph):
        return False
    if any(rg.deletion_at(i) > f for i in rg.nodes):
        return False
    return comp in source_components(decompose_scc(rg)) and len(comp) < g.n - 2 * f


def single_source_check(g: CommGraph, f: int, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff every reduced graph over every |F| <= f has exactly one source
    component. Fails exactly when two disjoint candidate source components
    coexist for some fault set (compatible deletions realize both at once)."""
    _check_b_budget(g.n, f, budget)
    for fmask in _fault_masks(g.n, f):
        if fmask == g.full_mask:
            continue
        cands = possible_source_components(g, fmask, f)
        for idx, s in enumerate(cands):
            for t in cands[idx + 1:]:
                if not s & t:
                    return False
    return True


# --- maximum flow on the node-split network -------------------------------
#
# Node v becomes v_in = 2v and v_out = 2v+1 joined by a unit-capacity edge;
# every graph edge (u, v) becomes u_out -> v_in with unit capacity. Unit node
# capacities make flow paths internally vertex-disjoint.


def _split_network(g: CommGraph, x: int, y: int, cap_xy: int) -> dict[int, dict[int, int]]:
    cap: dict[int, dict[int, int]] = {}
    big = g.n + cap_xy  # exceeds any possible flow, so cuts land on split edges

    def add(u, v, c):
        cap.setdefault(u, {})[v] = cap.setdefault(u, {}).get(v, 0) + c
        cap.setdefault(v, {}).setdefault(u, 0)

    for v in g.nodes:
        if v != x and v != y:
            add(2 * v, 2 * v + 1, 1)
    for i, j in sorted(g.edges):
        # the direct x->y edge stands for exactly one path
        add(2 * i + 1, 2 * j, 1 if (i, j) == (x, y) else big)
    # endpoints carry no interior constraint
    add(2 * x, 2 * x + 1, cap_xy)
    add(2 * y, 2 * y + 1, cap_xy)
    return cap


def _max_flow(cap: dict[int, dict[int, int]], s: int, t: int, limit: int) -> tuple[int, dict]:
    """Edmonds-Karp with an augmentation limit; returns (value, flow)."""
    flow: dict[int, dict[int, int]] = {u: {v: 0 for v in nbrs} for u, nbrs in cap.items()}
    value = 0
    while value < limit:
        parent = {s: None}
        queue = deque([s])
        while queue and t not in parent:
            u = queue.popleft()
            for v in cap[u]:
                if v not in parent and cap[u][v] - flow[u][v] > 0:
                    parent[v] = u
                    queue.append(v)
        if t not in parent:
            break
        v = t
        while parent[v] is not None:
            u = parent[v]
            flow[u][v] += 1
            flow[v][u] -= 1
            v = u
        value += 1
    return value, flow


def _local_connectivity(g: CommGraph, x: int, y: int, limit: int) -> tuple[int, dict]:
    cap = _split_network(g, x, y, limit)
    return _max_flow(cap, 2 * x + 1, 2 * y, limit)


def vertex_connectivity(g: CommGraph) -> int:
    """Largest k such that every separating set of g has >= k vertices.

    Complete graphs return n-1 by convention; graphs that are not strongly
    connected return 0 (the empty set already separates them).
    """
    if g.n < 2:
        raise GraphError("connectivity needs at least 2 nodes")
    if g.is_complete():
        return g.n - 1
    best = g.n - 1
    for x in g.nodes:
        for y in g.nodes:
            if x == y or g.has_edge(x, y):
                continue
            value, _ = _local_connectivity(g, x, y, best)
            best = min(best, value)
            if best == 0:
                return 0
    return best


def min_vertex_cut(g: CommGraph, x: int, y: int) -> frozenset[int]:
    """A minimum x-y separating set for non-adjacent x, y (may be empty)."""
    if x == y:
        raise GraphError("x and y must differ")
    if g.has_edge(x, y):
        raise GraphError("no vertex cut exists for an adjacent pair")
    cap = _split_network(g, x, y, g.n)
    value, flow = _max_flow(cap, 2 * x + 1, 2 * y, g.n)
    # min cut = nodes whose split edge crosses the residual-reachable frontier
    reach = {2 * x + 1}
    queue = deque(reach)
    while queue:
        u = queue.popleft()
        for v in cap[u]:
            if v not in reach and cap[u][v] - flow[u][v] > 0:
                reach.add(v)
                queue.append(v)
    cut = frozenset(
        v for v in g.nodes
        if v not in (x, y) and 2 * v in reach and 2 * v + 1 not in reach
    )
    assert len(cut) == value
    return cut


def check_connectivity_threshold(g: CommGraph, k: int) -> ConditionVerdict:
    """Verdict for "g is k-connected", with a separating set as witness."""
    if g.is_complete():
        return ConditionVerdict(holds=g.n - 1 >= k)
    for x in g.nodes:
        for y in g.nodes:
            if x == y or g.has_edge(x, y):
                continue
            value, _ = _local_connectivity(g, x, y, k)
            if value < k:
                return ConditionVerdict(holds=False, witness=min_vertex_cut(g, x, y))
    return ConditionVerdict(holds=True)


def disjoint_paths(g: CommGraph, x: int, y: int, k: int) -> DisjointPathSet:
    """Up to k internally vertex-disjoint directed x->y paths.

    The returned count equals min(k, max-flow value in the node-split
    network); a direct (x, y) edge counts as one path.
    """
    if x == y:
        raise GraphError("x and y must differ")
    cap = _split_network(g, x, y, k)
    value, flow = _max_flow(cap, 2 * x + 1, 2 * y, k)
    paths = []
    for _ in range(value):
        path = [x]
        u = 2 * x + 1
        while u != 2 * y:
            nxt = None
            for v in sorted(cap[u]):
                if flow[u][v] > 0:
                    nxt = v
                    break
            assert nxt is not None, "flow decomposition ran dry"
            flow[u][nxt] -= 1
            if nxt % 2 == 0 and nxt != 2 * y:
                path.append(nxt // 2)
                nxt += 1  # pass through the split node
                flow[nxt - 1][nxt] -= 1
            u = nxt
        path.append(y)
        paths.append(tuple(path))
    return DisjointPathSet(source=x, sink=y, paths=tuple(paths))

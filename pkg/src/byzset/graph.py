"""Directed communication graphs, SCC decomposition, and reduced-graph machinery.

Agents are dense integers 0..n-1. Agent sets are passed around both as Python
sets (public API) and as integer bitmasks (internal kernels); bit i stands for
agent i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Iterable, Iterator

DEFAULT_BUDGET = 10**6


class GraphError(ValueError):
    """Malformed graph input (self-loop, out-of-range endpoint, bad agent id)."""


class BudgetExceededError(RuntimeError):
    """Predicted enumeration work exceeds the configured budget."""


def mask_of(agents: Iterable[int]) -> int:
    m = 0
    for a in agents:
        m |= 1 << a
    return m


def bits(mask: int) -> Iterator[int]:
    """Yield set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def set_of(mask: int) -> frozenset[int]:
    return frozenset(bits(mask))


@dataclass(frozen=True)
class CommGraph:
    """Directed graph over agents 0..n-1; edge (i, j) means i can send to j."""

    n: int
    edges: frozenset[tuple[int, int]]

    @cached_property
    def in_masks(self) -> tuple[int, ...]:
        """in_masks[i] has bit j set iff j is an incoming neighbor of i."""
        masks = [0] * self.n
        for i, j in self.edges:
            masks[j] |= 1 << i
        return tuple(masks)

    @cached_property
    def out_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for i, j in self.edges:
            masks[i] |= 1 << j
        return tuple(masks)

    @property
    def nodes(self) -> range:
        return range(self.n)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edges

    def is_complete(self) -> bool:
        return len(self.edges) == self.n * (self.n - 1)


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> CommGraph:
    """Build a graph, deduplicating edges and rejecting self-loops."""
    if n < 0:
        raise GraphError(f"agent count must be nonnegative, got {n}")
    dedup = set()
    for i, j in edges:
        if i == j:
            raise GraphError(f"self-loop ({i},{i}) not allowed")
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i},{j}) out of range for n={n}")
        dedup.add((i, j))
    return CommGraph(n=n, edges=frozenset(dedup))


def complete_graph(n: int) -> CommGraph:
    return build_graph(n, [(i, j) for i in range(n) for j in range(n) if i != j])


def cycle_graph(n: int) -> CommGraph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def incoming_neighbors(g: CommGraph, i: int) -> frozenset[int]:
    """All j with an edge (j, i); never contains i."""
    if not 0 <= i < g.n:
        raise GraphError(f"agent {i} out of range for n={g.n}")
    return set_of(g.in_masks[i])


def outgoing_neighbors(g: CommGraph, i: int) -> frozenset[int]:
    if not 0 <= i < g.n:
        raise GraphError(f"agent {i} out of range for n={g.n}")
    return set_of(g.out_masks[i])


@dataclass(frozen=True)
class Partition:
    """Disjoint split of the agents into L, R, F with L | R | F covering all."""

    left: frozenset[int]
    right: frozenset[int]
    faulty: frozenset[int]


@dataclass(frozen=True)
class ReducedGraph:
    """Graph left after deleting F and up to f extra incoming edges per node.

    ``surviving_edges`` is a subset of the base edges restricted to nodes
    outside ``faulty``.
    """

    base: CommGraph = field(repr=False)
    faulty: frozenset[int]
    surviving_edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        fmask = mask_of(self.faulty)
        for i, j in self.surviving_edges:
            if (1 << i) & fmask or (1 << j) & fmask:
                raise GraphError(f"surviving edge ({i},{j}) touches removed set")
            if (i, j) not in self.base.edges:
                raise GraphError(f"({i},{j}) is not an edge of the base graph")

    @property
    def nodes(self) -> tuple[int, ...]:
        fmask = mask_of(self.faulty)
        return tuple(i for i in self.base.nodes if not (1 << i) & fmask)

    @cached_property
    def in_masks(self) -> tuple[int, ...]:
        masks = [0] * self.base.n
        for i, j in self.surviving_edges:
            masks[j] |= 1 << i
        return tuple(masks)

    def deletion_at(self, i: int) -> int:
        """Number of incoming edges deleted at surviving node i (beyond F removal)."""
        survivors = self.base.full_mask & ~mask_of(self.faulty)
        before = (self.base.in_masks[i] & survivors).bit_count()
        return before - self.in_masks[i].bit_count()


@dataclass(frozen=True)
class Decomposition:
    """Strongly connected components plus the condensation DAG over them.

    Components are ordered by their smallest member; ``dag_edges`` are pairs
    of component indices.
    """

    components: tuple[frozenset[int], ...]
    dag_edges: frozenset[tuple[int, int]]


def _scc_masks(nodes: Iterable[int], out_masks: tuple[int, ...]) -> list[int]:
    """Iterative Tarjan over the given node subset; returns component masks."""
    node_list = list(nodes)
    node_set = mask_of(node_list)
    index: dict[int, int] = {}
    lowlink: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[int] = []
    counter = itertools.count()

    for root in node_list:
        if root in index:
            continue
        work = [(root, iter(bits(out_masks[root] & node_set)))]
        index[root] = lowlink[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            v, succs = work[-1]
            advanced = False
            for w in succs:
                if w not in index:
                    index[w] = lowlink[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(bits(out_masks[w] & node_set))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = 0
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp |= 1 << w
                    if w == v:
                        break
                comps.append(comp)
    return comps


def decompose_scc(g: CommGraph | ReducedGraph) -> Decomposition:
    """Maximal strongly connected components and their (acyclic) condensation."""
    if isinstance(g, ReducedGraph):
        nodes = g.nodes
        out_masks = [0] * g.base.n
        for i, j in g.surviving_edges:
            out_masks[i] |= 1 << j
        out_masks = tuple(out_masks)
        edges = g.surviving_edges
    else:
        nodes = g.nodes
        out_masks = g.out_masks
        edges = g.edges

    comp_masks = sorted(_scc_masks(nodes, out_masks), key=lambda m: m & -m)
    which = {}
    for k, m in enumerate(comp_masks):
        for v in bits(m):
            which[v] = k
    dag = set()
    for i, j in edges:
        ki, kj = which[i], which[j]
        if ki != kj:
            dag.add((ki, kj))
    return Decomposition(
        components=tuple(set_of(m) for m in comp_masks),
        dag_edges=frozenset(dag),
    )


def source_components(d: Decomposition) -> list[frozenset[int]]:
    """Components whose condensation vertex has no incoming edge."""
    has_in = {l for _, l in d.dag_edges}
    return [c for k, c in enumerate(d.components) if k not in has_in]


def _subsets_le(mask: int, limit: int) -> Iterator[int]:
    """Submasks of ``mask`` with at most ``limit`` bits, ordered by (size, value)."""
    members = list(bits(mask))
    for size in range(min(limit, len(members)) + 1):
        chosen = sorted(mask_of(c) for c in itertools.combinations(members, size))
        yield from chosen


def predicted_reduced_graph_count(g: CommGraph, faulty: Iterable[int], f: int) -> int:
    """Closed-form count of distinct deletion choices for enumerate_reduced_graphs."""
    fmask = mask_of(faulty)
    survivors = g.full_mask & ~fmask
    total = 1
    for i in bits(survivors):
        d = (g.in_masks[i] & survivors).bit_count()
        total *= sum(comb(d, k) for k in range(min(f, d) + 1))
    return total


def enumerate_reduced_graphs(
    g: CommGraph, faulty: Iterable[int], f: int
) -> Iterator[ReducedGraph]:
    """Every reduced graph for fault set F: all ways of deleting 0..f incoming
    edges per surviving node, after removing edges incident on F.

    Deterministic order: nodes ascending, per-node deletion subsets by
    (size, bitmask), last node varying fastest.
    """
    fset = frozenset(faulty)
    if len(fset) > f:
        raise GraphError(f"|F|={len(fset)} exceeds f={f}")
    fmask = mask_of(fset)
    survivors = g.full_mask & ~fmask
    nodes = list(bits(survivors))
    per_node_choices = [
        list(_subsets_le(g.in_masks[i] & survivors, f)) for i in nodes
    ]
    base_edges = [(i, j) for (i, j) in sorted(g.edges)
                  if (1 << i) & survivors and (1 << j) & survivors]
    for deletion in itertools.product(*per_node_choices):
        removed = dict(zip(nodes, deletion))
        kept = frozenset(
            (i, j) for (i, j) in base_edges if not (removed[j] >> i) & 1
        )
        yield ReducedGraph(base=g, faulty=fset, surviving_edges=kept)


def enumerate_partitions(g: CommGraph, f: int) -> Iterator[Partition]:
    """Every partition of the agents into (L, R, F) with |F| <= f.

    Empty L or R are included. Order: node 0 is the most significant base-3
    digit with L < R < F.
    """
    for assignment in itertools.product((0, 1, 2), repeat=g.n):
        if assignment.count(2) > f:
            continue
        l = frozenset(i for i, a in enumerate(assignment) if a == 0)
        r = frozenset(i for i, a in enumerate(assignment) if a == 1)
        fl = frozenset(i for i, a in enumerate(assignment) if a == 2)
        yield Partition(left=l, right=r, faulty=fl)


def _partition_masks(n: int, f: int) -> list[tuple[int, int, int]]:
    """(L, R, F) mask triples in enumerate_partitions order. Cached per (n, f)."""
    key = (n, f)
    cached = _PARTITION_CACHE.get(key)
    if cached is None:
        cached = []
        for assignment in itertools.product((0, 1, 2), repeat=n):
            if assignment.count(2) > f:
                continue
            l = r = fl = 0
            for i, a in enumerate(assignment):
                if a == 0:
                    l |= 1 << i
                elif a == 1:
                    r |= 1 << i
                else:
                    fl |= 1 << i
            cached.append((l, r, fl))
        _PARTITION_CACHE[key] = cached
    return cached


_PARTITION_CACHE: dict[tuple[int, int], list[tuple[int, int, int]]] = {}


def _strongly_connected_mask(sub: int, out_masks: tuple[int, ...]) -> bool:
    """True iff the subgraph induced on mask ``sub`` is strongly connected."""
    if sub == 0:
        return False
    start = sub & -sub
    # forward closure inside sub
    reach = start
    frontier = start
    while frontier:
        nxt = 0
        for v in bits(frontier):
            nxt |= out_masks[v] & sub
        frontier = nxt & ~reach
        reach |= frontier
    if reach != sub:
        return False
    # backward closure: everything must reach start
    reach = start
    changed = True
    while changed:
        changed = False
        for v in bits(sub & ~reach):
            if out_masks[v] & reach:
                reach |= 1 << v
                changed = True
    return reach == sub


def possible_source_components(
    g: CommGraph, faulty_mask: int, f: int, max_size: int | None = None
) -> list[int]:
    """Masks of every agent set that is a source component of at least one
    reduced graph for fault set F.

    A set S qualifies exactly when the subgraph induced on S is strongly
    connected and every member has at most f incoming neighbors among the
    other survivors (so all of its external incoming edges fit the per-node
    deletion budget). Ordered by (size, mask); ``max_size`` prunes the search
    when only small components matter.
    """
    survivors = g.full_mask & ~faulty_mask
    in_masks = g.in_masks
    out_masks = g.out_masks
    members = list(bits(survivors))
    hi = len(members) if max_size is None else min(max_size, len(members))
    found = []
    for size in range(1, hi + 1):
        for combo in itertools.combinations(members, size):
            s = mask_of(combo)
            ext = survivors & ~s
            if any((in_masks[i] & ext).bit_count() > f for i in combo):
                continue
            if _strongly_connected_mask(s, out_masks):
                found.append(s)
    return found


def witness_reduced_graph(g: CommGraph, faulty_mask: int, component_mask: int) -> ReducedGraph:
    """The canonical reduced graph exhibiting ``component_mask`` as a source
    component: delete exactly the surviving external incoming edges of its
    members, keep everything else."""
    survivors = g.full_mask & ~faulty_mask
    kept = frozenset(
        (i, j)
        for (i, j) in g.edges
        if (1 << i) & survivors
        and (1 << j) & survivors
        and not ((1 << j) & component_mask and not (1 << i) & component_mask)
    )
    return ReducedGraph(base=g, faulty=set_of(faulty_mask), surviving_edges=kept)

"""Byzantine fault-tolerant distributed set intersection.

Protocols, graph-condition and redundancy checkers, impossibility
constructions, and a deterministic simulator, plus the reduction from
Byzantine optimization over finite grids.
"""

from .graph import (
    BudgetExceededError,
    CommGraph,
    Decomposition,
    GraphError,
    Partition,
    ReducedGraph,
    build_graph,
    complete_graph,
    cycle_graph,
    decompose_scc,
    enumerate_partitions,
    enumerate_reduced_graphs,
    incoming_neighbors,
    outgoing_neighbors,
    predicted_reduced_graph_count,
    source_components,
)
from .conditions import (
    ConditionVerdict,
    DisjointPathSet,
    check_condition_a,
    check_condition_async,
    check_condition_b,
    check_connectivity_threshold,
    disjoint_paths,
    min_vertex_cut,
    single_source_check,
    vertex_connectivity,
)
from .redundancy import (
    RedundancyVerdict,
    SetInstance,
    Universe,
    check_3f_redundancy,
    check_property_b,
    check_property_c,
    check_property_d,
    equivalence_bc,
    generate_instance,
    intersect,
)
from .protocols import (
    NO_QUORUM,
    NoQuorum,
    ProtocolOutcome,
    RelayedMessage,
    constrained_update,
    run_centralized,
    run_constrained,
    run_constrained_async,
    run_unconstrained,
)
from .adversary import (
    AdversaryStrategy,
    default_catalogue,
    strategy_constant,
    strategy_honest,
    strategy_include_y,
    strategy_random,
    strategy_split_brain,
)
from .simnet import (
    DeliverySchedule,
    Transcript,
    indistinguishable,
    run_async,
    run_sync,
    view_of,
)
from .attacks import condition_a_attack_pair, property_d_attack_pair, verify_pair
from .optbridge import (
    CostFunction,
    CostProfile,
    GridDomain,
    aggregate_argmin,
    build_profile,
    check_lemma1,
    check_property_a,
    check_property_e,
    generate_profile,
    solve_byz_opt,
)

__version__ = "0.1.0"

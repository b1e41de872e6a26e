"""Build rooted phylogenetic networks from (possibly conflicting, non-dense)
sets of rooted triplets."""

from .builder import (
    BuildConfig,
    BuildError,
    CandidateScore,
    RepairError,
    build_network,
    repair_consistency,
    select_reticulations,
    triptree,
)
from .consistency import all_consistent_triplets, inconsistent_triplets, is_consistent
from .decomposition import (
    SNPartition,
    WeightedLeafGraph,
    induced_triplets,
    is_sn_set,
    restrict_triplets,
    sn_decompose,
    split_components,
)
from .heights import (
    HeightFunction,
    PairDigraph,
    break_cycles,
    build_pair_digraph,
    heights_from_network,
    layer_heights,
)
from .network import (
    Network,
    NetworkBuilder,
    NetworkStats,
    NodeKind,
    from_json,
    network_stats,
    serialize_network,
    to_dot,
    to_enewick,
    to_json,
    validate_network,
)
from .triplets import Triplet, TripletSet, parse_triplets

__version__ = "0.1.0"

"""Bi-modal constrained coding: fixed-length encoders whose out-edges
split evenly across a two-class parity cover of the alphabet."""

from .graphs import (
    AdjacencyPair,
    Edge,
    Finite,
    Infinite,
    LabeledGraph,
    NotDeterministic,
    NotIrreducible,
    ParityPartition,
    Unknown,
    ValidationError,
    adjacency,
    adjacency_pair,
    determinize,
    follower_le,
    irreducible_components,
    is_deterministic,
    memory,
    merge_states,
    parity_subgraph,
    period,
    power,
    validate_graph,
)
from .spectra import (
    ApproxEigenvector,
    NotFoundWithin,
    RatePoint,
    anticipation_lower_bound,
    capacity,
    coding_ratio,
    franaszek_joint,
    joint_ae_exists,
    min_infnorm_ae,
    perron,
    rate_region,
)
from .synth import (
    ArityMismatch,
    DeltaPartition,
    DeltaSet,
    InfeasibleVector,
    InsufficientWeight,
    SplitInfeasible,
    TaggedEncoder,
    assign_block_tags,
    build_delta,
    cover_consistent_partition,
    extract_deterministic,
    merge_split_pair,
    split_one_round,
    split_state,
    stether,
    stether_partition,
    stether_punctured,
)
from .verify import (
    NotDecodable,
    PairGraph,
    PreconditionFailed,
    UnknownTag,
    VerifyReport,
    anticipation,
    check_encoder,
    decode_sliding,
    decode_stream,
    definiteness,
    encode_stream,
    is_definite,
    losslessness,
    presents_subset,
    sliding_block_decodable,
    witness_ae,
)
from .io import (
    ParseError,
    export_dot,
    parse_encoder_file,
    parse_graph_file,
    serialize_encoder,
    serialize_graph,
)
from .construct import graph_from_matrices, rll_graph

__all__ = [n for n in dir() if not n.startswith("_")]

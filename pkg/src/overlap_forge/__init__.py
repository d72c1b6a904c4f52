"""Overlap test-case generation, reassembly simulation, and differential
analysis for IPv4/IPv6 fragments and TCP segments."""

from .analyzer import (
    AttackFinding,
    AttackScenario,
    ConsistencyReport,
    SurfaceReport,
    attack_surface,
    classify,
    compare,
)
from .chunks import (
    Chunk,
    ChunkSequence,
    Mode,
    Protocol,
    overlap_region,
    relation_pairs,
)
from .engine import (
    IgnoreSemantics,
    Outcome,
    PolicyTable,
    ReassemblyResult,
    ReassemblyStatus,
    constant_policy,
    predict_outcome_payload,
    reassemble,
)
from .errors import (
    AnomalousObservationError,
    DecodingError,
    EncodingError,
    MissingRelationError,
    NonOverlappingRelationError,
    OverlapForgeError,
    PcapFormatError,
    PolicyGapError,
    PolicySchemaError,
    ProfileNotFoundError,
)
from .generator import (
    GeneratorConfig,
    PayloadPattern,
    TestCase,
    build_multiple,
    build_single,
    canonical_geometry,
    make_pattern,
)
from .inference import Observation, infer_outcome, infer_policy
from .intervals import (
    OVERLAP_ORDER,
    AllenRelation,
    ByteInterval,
    enumerate_overlapping,
    inverse,
    is_overlapping,
    relate,
)
from .registry import (
    PolicyProfile,
    available_profiles,
    builtin_profiles,
    get_profile,
    load_profile,
    lookup,
    serialize_profile,
)
from .wire import Frame, NetConfig, encode, internet_checksum, parse_frames, read_pcap, write_pcap

__version__ = "0.1.0"

__all__ = [
    "AllenRelation",
    "AnomalousObservationError",
    "AttackFinding",
    "AttackScenario",
    "ByteInterval",
    "Chunk",
    "ChunkSequence",
    "ConsistencyReport",
    "DecodingError",
    "EncodingError",
    "Frame",
    "GeneratorConfig",
    "IgnoreSemantics",
    "MissingRelationError",
    "Mode",
    "NetConfig",
    "NonOverlappingRelationError",
    "OVERLAP_ORDER",
    "Observation",
    "Outcome",
    "OverlapForgeError",
    "PayloadPattern",
    "PcapFormatError",
    "PolicyGapError",
    "PolicyProfile",
    "PolicySchemaError",
    "PolicyTable",
    "ProfileNotFoundError",
    "ReassemblyResult",
    "ReassemblyStatus",
    "SurfaceReport",
    "TestCase",
    "attack_surface",
    "available_profiles",
    "build_multiple",
    "build_single",
    "builtin_profiles",
    "canonical_geometry",
    "classify",
    "compare",
    "constant_policy",
    "encode",
    "enumerate_overlapping",
    "get_profile",
    "infer_outcome",
    "infer_policy",
    "internet_checksum",
    "inverse",
    "is_overlapping",
    "load_profile",
    "lookup",
    "make_pattern",
    "overlap_region",
    "parse_frames",
    "predict_outcome_payload",
    "read_pcap",
    "reassemble",
    "relate",
    "relation_pairs",
    "serialize_profile",
    "write_pcap",
]

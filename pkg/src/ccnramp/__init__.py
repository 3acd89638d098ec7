"""Anchor-based label-swapping content forwarding, with an NDN baseline and a simulator."""

from .content_store import ContentStore
from .control_plane import (AnchorAssignment, Link, RouteTables, Topology, compute_routes,
                            inject_inconsistency, load_anchors, load_topology,
                            multihoming_advantage, verify_path_equivalence)
from .names import Name, PrefixTrie, longest_prefix_match, parse_name
from .ndn_router import NdnRouter
from .ramp_router import DataPacket, ErrorCode, ErrorMessage, Interest, RampRouter

__version__ = "0.1.0"

__all__ = [
    "ContentStore", "AnchorAssignment", "Link", "RouteTables", "Topology", "compute_routes",
    "inject_inconsistency", "load_anchors", "load_topology", "multihoming_advantage",
    "verify_path_equivalence", "Name", "PrefixTrie", "longest_prefix_match", "parse_name",
    "NdnRouter", "DataPacket", "ErrorCode", "ErrorMessage", "Interest", "RampRouter",
]

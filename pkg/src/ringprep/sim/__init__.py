from .intervals import optimize_intervals
from .protocol import ProtocolResult, PulseOptions, build_engine, run_protocol
from .targets import cluster_target_diag, ring_adjacency, stabilizer_operators

__all__ = [
    "ProtocolResult",
    "PulseOptions",
    "build_engine",
    "cluster_target_diag",
    "optimize_intervals",
    "ring_adjacency",
    "run_protocol",
    "stabilizer_operators",
]

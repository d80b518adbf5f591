"""Simulator and algorithm suite for hybrid distributed networks.

Graphs have nodes ``1..n``; every algorithm takes an optional
:class:`~hybridnet.simcore.Network` so calls can be composed on one trace.
"""

from .graph import INF, Graph, GraphError, id_bits, load_graph
from .primitives import (AggregateFn, Result, aggregate_and_broadcast, bcc_round, chunked_sum,
                         global_broadcast, token_dissemination)
from .simcore import (UNBOUNDED, CapacityError, HybridConfig, Message, Network, NodeProgram,
                      RoundLimitExceeded, TraceReport, node_rng, run)

__version__ = "0.1.0"

__all__ = [
    "INF", "Graph", "GraphError", "id_bits", "load_graph",
    "AggregateFn", "Result", "aggregate_and_broadcast", "bcc_round", "chunked_sum",
    "global_broadcast", "token_dissemination",
    "UNBOUNDED", "CapacityError", "HybridConfig", "Message", "Network", "NodeProgram",
    "RoundLimitExceeded", "TraceReport", "node_rng", "run",
]

# Graph package
from .vortex_pair_graph import VortexPairOrchestrator, create_vortex_pair_graph, run_vortex_pair

__all__ = ["VortexPairOrchestrator", "create_vortex_pair_graph", "run_vortex_pair"]

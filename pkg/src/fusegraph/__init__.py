"""Resource-efficient generation of graph states by fusing 3-qubit star states.

Pipeline: :func:`unravel` the target graph, :func:`build_network` of resource
states, :func:`determine_order` of fusions, and :func:`optimize` over
randomised trials. :mod:`fusegraph.succprob` gives the exact distribution of
the number of resource states consumed.
"""

from .clifford import Clifford, CliffordRecord
from .generators import FamilySpec, generate, parse_family
from .graph import Graph, GraphError, fuse_vertices, local_complement, p_succ_from_loss
from .network import FusionNetwork, build_network
from .optimizer import Adaptive, Fixed, Outcome, StrategyConfig, optimize
from .ordering import FusionSchedule, determine_order, maximum_matching
from .succprob import OverheadDistribution, distribution, distribution_to_tail, quantile
from .unravel import UnravelResult, recover, unravel

__all__ = [
    "Adaptive",
    "Clifford",
    "CliffordRecord",
    "FamilySpec",
    "Fixed",
    "FusionNetwork",
    "FusionSchedule",
    "Graph",
    "GraphError",
    "Outcome",
    "OverheadDistribution",
    "StrategyConfig",
    "UnravelResult",
    "build_network",
    "determine_order",
    "distribution",
    "distribution_to_tail",
    "fuse_vertices",
    "generate",
    "local_complement",
    "maximum_matching",
    "optimize",
    "p_succ_from_loss",
    "parse_family",
    "quantile",
    "recover",
    "unravel",
]

__version__ = "0.1.0"
